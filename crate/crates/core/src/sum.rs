//! Compensated summation.

use crate::C64;

/// Neumaier's variant of Kahan summation for real terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum of complex terms, real and imaginary parts carried separately.
#[derive(Clone, Copy, Debug, Default)]
pub struct CSum {
    re: Sum,
    im: Sum,
}

impl CSum {
    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

pub fn csum<I: IntoIterator<Item = C64>>(it: I) -> C64 {
    let mut s = CSum::default();
    for z in it {
        s.add(z);
    }
    s.value()
}

pub fn rsum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = Sum::default();
    for x in it {
        s.add(x);
    }
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        assert_eq!(rsum([1.0, 1e100, 1.0, -1e100]), 2.0);
        let z = csum([
            C64::new(1e16, 1.0),
            C64::new(1.0, -1e16),
            C64::new(-1e16, 1e16),
        ]);
        assert_eq!(z, C64::new(1.0, 1.0));
    }
}
