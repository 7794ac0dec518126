//! Minimal double-double arithmetic (≈32 significant digits).

use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Dd {
    pub fn zero() -> Self {
        Dd::from(0.0)
    }

    pub fn one() -> Self {
        Dd::from(1.0)
    }

    pub fn from_i128(v: i128) -> Self {
        let hi = v as f64;
        let rest = v - hi as i128;
        Dd::from(hi).add(Dd::from(rest as f64))
    }

    pub fn factorial(n: usize) -> Self {
        (1..=n).fold(Dd::one(), |acc, i| acc.mul(Dd::from(i as f64)))
    }

    pub fn powi(self, n: usize) -> Self {
        (0..n).fold(Dd::one(), |acc, _| acc.mul(self))
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }
}

impl Cdd {
    pub fn zero() -> Self {
        Cdd::real(Dd::zero())
    }

    pub fn real(x: Dd) -> Self {
        Cdd { re: x, im: Dd::zero() }
    }

    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn scale(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn div(self, o: Cdd) -> Cdd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let conj = Cdd {
            re: o.re,
            im: o.im.neg(),
        };
        let num = self.mul(conj);
        Cdd {
            re: num.re.div(den),
            im: num.im.div(den),
        }
    }

    pub fn norm_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}
