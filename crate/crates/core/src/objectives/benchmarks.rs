//! Two-dimensional test surfaces with analytic gradients.
//!
//! Formulas, with `(x, y)` the two coordinates:
//!
//! | name | f(x, y) | global minimum |
//! |---|---|---|
//! | himmelblau | (x²+y−11)² + (x+y²−7)² | (3,2) and three others, f = 0 |
//! | ackley | −20·exp(−0.2·√(½(x²+y²))) − exp(½(cos 2πx + cos 2πy)) + e + 20 | (0,0), f = 0 |
//! | beale | (1.5−x+xy)² + (2.25−x+xy²)² + (2.625−x+xy³)² | (3,0.5), f = 0 |
//! | goldstein_price | [1+(x+y+1)²(19−14x+3x²−14y+6xy+3y²)]·[30+(2x−3y)²(18−32x+12x²+48y−36xy+27y²)] | (0,−1), f = 3 |
//! | three_hump_camel | 2x² − 1.05x⁴ + x⁶/6 + xy + y² | (0,0), f = 0 |
//! | easom | −cos x·cos y·exp(−(x−π)² − (y−π)²) | (π,π), f = −1 |
//! | bukin | 100·√\|y − 0.01x²\| + 0.01·\|x+10\| | (−10,1), f = 0 |
//! | matyas | 0.26(x²+y²) − 0.48xy | (0,0), f = 0 |
//! | dropwave | −(1 + cos(12√(x²+y²))) / (½(x²+y²) + 2) | (0,0), f = −1 |
//! | levy | sin²(πw₁) + (w₁−1)²[1+10 sin²(πw₁+1)] + (w₂−1)²[1+sin²(2πw₂)], wᵢ = 1+(xᵢ−1)/4 | (1,1), f = 0 |
//!
//! Bukin's gradient is undefined on the ridge `y = 0.01x²` and at `x = −10`.
//! The ridge term contributes zero there (a valid subgradient of `√|u|` at
//! `u = 0`), and `|x+10|` uses sign `+1` at zero.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Himmelblau,
    Ackley,
    Beale,
    GoldsteinPrice,
    ThreeHumpCamel,
    Easom,
    Bukin,
    Matyas,
    Dropwave,
    Levy,
}

impl Benchmark {
    pub const ALL: [Benchmark; 10] = [
        Benchmark::Himmelblau,
        Benchmark::Ackley,
        Benchmark::Beale,
        Benchmark::GoldsteinPrice,
        Benchmark::ThreeHumpCamel,
        Benchmark::Easom,
        Benchmark::Bukin,
        Benchmark::Matyas,
        Benchmark::Dropwave,
        Benchmark::Levy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Himmelblau => "himmelblau",
            Benchmark::Ackley => "ackley",
            Benchmark::Beale => "beale",
            Benchmark::GoldsteinPrice => "goldstein_price",
            Benchmark::ThreeHumpCamel => "three_hump_camel",
            Benchmark::Easom => "easom",
            Benchmark::Bukin => "bukin",
            Benchmark::Matyas => "matyas",
            Benchmark::Dropwave => "dropwave",
            Benchmark::Levy => "levy",
        }
    }

    pub fn bounds(self) -> [(f64, f64); 2] {
        match self {
            Benchmark::Himmelblau | Benchmark::ThreeHumpCamel => [(-5.0, 5.0); 2],
            Benchmark::Ackley => [(-32.768, 32.768); 2],
            Benchmark::Beale => [(-4.5, 4.5); 2],
            Benchmark::GoldsteinPrice => [(-2.0, 2.0); 2],
            Benchmark::Easom => [(-100.0, 100.0); 2],
            Benchmark::Bukin => [(-15.0, -5.0), (-3.0, 3.0)],
            Benchmark::Matyas | Benchmark::Levy => [(-10.0, 10.0); 2],
            Benchmark::Dropwave => [(-5.12, 5.12); 2],
        }
    }

    pub fn global_minima(self) -> Vec<Vec<f64>> {
        match self {
            Benchmark::Himmelblau => vec![
                vec![3.0, 2.0],
                vec![-2.805_118_086_952_745, 3.131_312_518_250_573],
                vec![-3.779_310_253_377_747, -3.283_185_991_286_169_4],
                vec![3.584_428_340_330_491_7, -1.848_126_526_964_403_6],
            ],
            Benchmark::Ackley
            | Benchmark::ThreeHumpCamel
            | Benchmark::Matyas
            | Benchmark::Dropwave => vec![vec![0.0, 0.0]],
            Benchmark::Beale => vec![vec![3.0, 0.5]],
            Benchmark::GoldsteinPrice => vec![vec![0.0, -1.0]],
            Benchmark::Easom => vec![vec![PI, PI]],
            Benchmark::Bukin => vec![vec![-10.0, 1.0]],
            Benchmark::Levy => vec![vec![1.0, 1.0]],
        }
    }

    /// Fallback starting point when an experiment does not set one.
    pub fn default_init(self) -> [f64; 2] {
        match self {
            Benchmark::Himmelblau => [0.0, 0.0],
            Benchmark::Ackley => [-2.6, 2.6],
            Benchmark::Beale => [1.0, 1.0],
            Benchmark::GoldsteinPrice => [0.5, 0.5],
            Benchmark::ThreeHumpCamel => [1.5, 1.5],
            Benchmark::Easom => [2.5, 2.5],
            Benchmark::Bukin => [-8.0, 1.5],
            Benchmark::Matyas => [1.0, 0.6],
            Benchmark::Dropwave => [1.5, 1.5],
            Benchmark::Levy => [4.0, 4.0],
        }
    }

    pub fn value(self, p: &[f64]) -> f64 {
        let (x, y) = (p[0], p[1]);
        match self {
            Benchmark::Himmelblau => (x * x + y - 11.0).powi(2) + (x + y * y - 7.0).powi(2),
            Benchmark::Ackley => {
                let r = (0.5 * (x * x + y * y)).sqrt();
                let c = (0.5 * ((2.0 * PI * x).cos() + (2.0 * PI * y).cos())).exp();
                -20.0 * (-0.2 * r).exp() - c + E + 20.0
            }
            Benchmark::Beale => {
                (1.5 - x + x * y).powi(2)
                    + (2.25 - x + x * y * y).powi(2)
                    + (2.625 - x + x * y * y * y).powi(2)
            }
            Benchmark::GoldsteinPrice => {
                let (s, p) = gp_first(x, y);
                let (d, q) = gp_second(x, y);
                (1.0 + s * s * p) * (30.0 + d * d * q)
            }
            Benchmark::ThreeHumpCamel => {
                2.0 * x * x - 1.05 * x.powi(4) + x.powi(6) / 6.0 + x * y + y * y
            }
            Benchmark::Easom => {
                -x.cos() * y.cos() * (-(x - PI).powi(2) - (y - PI).powi(2)).exp()
            }
            Benchmark::Bukin => 100.0 * (y - 0.01 * x * x).abs().sqrt() + 0.01 * (x + 10.0).abs(),
            Benchmark::Matyas => 0.26 * (x * x + y * y) - 0.48 * x * y,
            Benchmark::Dropwave => {
                let r2 = x * x + y * y;
                -(1.0 + (12.0 * r2.sqrt()).cos()) / (0.5 * r2 + 2.0)
            }
            Benchmark::Levy => {
                let (w1, w2) = (1.0 + (x - 1.0) / 4.0, 1.0 + (y - 1.0) / 4.0);
                (PI * w1).sin().powi(2)
                    + (w1 - 1.0).powi(2) * (1.0 + 10.0 * (PI * w1 + 1.0).sin().powi(2))
                    + (w2 - 1.0).powi(2) * (1.0 + (2.0 * PI * w2).sin().powi(2))
            }
        }
    }

    pub fn gradient(self, p: &[f64]) -> Vec<f64> {
        let (x, y) = (p[0], p[1]);
        let (gx, gy) = match self {
            Benchmark::Himmelblau => {
                let a = x * x + y - 11.0;
                let b = x + y * y - 7.0;
                (4.0 * x * a + 2.0 * b, 2.0 * a + 4.0 * y * b)
            }
            Benchmark::Ackley => {
                let r = (0.5 * (x * x + y * y)).sqrt();
                let c = (0.5 * ((2.0 * PI * x).cos() + (2.0 * PI * y).cos())).exp();
                let radial = if r > 0.0 { 2.0 * (-0.2 * r).exp() / r } else { 0.0 };
                (
                    radial * x + PI * (2.0 * PI * x).sin() * c,
                    radial * y + PI * (2.0 * PI * y).sin() * c,
                )
            }
            Benchmark::Beale => {
                let t1 = 1.5 - x + x * y;
                let t2 = 2.25 - x + x * y * y;
                let t3 = 2.625 - x + x * y * y * y;
                (
                    2.0 * t1 * (y - 1.0) + 2.0 * t2 * (y * y - 1.0) + 2.0 * t3 * (y * y * y - 1.0),
                    2.0 * t1 * x + 4.0 * t2 * x * y + 6.0 * t3 * x * y * y,
                )
            }
            Benchmark::GoldsteinPrice => {
                let (s, p) = gp_first(x, y);
                let (d, q) = gp_second(x, y);
                let a = 1.0 + s * s * p;
                let b = 30.0 + d * d * q;
                let dp = -14.0 + 6.0 * x + 6.0 * y;
                let da = 2.0 * s * p + s * s * dp;
                let bx = 4.0 * d * q + d * d * (-32.0 + 24.0 * x - 36.0 * y);
                let by = -6.0 * d * q + d * d * (48.0 - 36.0 * x + 54.0 * y);
                (da * b + a * bx, da * b + a * by)
            }
            Benchmark::ThreeHumpCamel => {
                (4.0 * x - 4.2 * x.powi(3) + x.powi(5) + y, x + 2.0 * y)
            }
            Benchmark::Easom => {
                let e = (-(x - PI).powi(2) - (y - PI).powi(2)).exp();
                let cc = x.cos() * y.cos();
                (
                    e * (x.sin() * y.cos() + 2.0 * (x - PI) * cc),
                    e * (x.cos() * y.sin() + 2.0 * (y - PI) * cc),
                )
            }
            Benchmark::Bukin => {
                let u = y - 0.01 * x * x;
                let ridge = if u == 0.0 { 0.0 } else { 50.0 * u.signum() / u.abs().sqrt() };
                let side = if x + 10.0 >= 0.0 { 0.01 } else { -0.01 };
                (ridge * (-0.02 * x) + side, ridge)
            }
            Benchmark::Matyas => (0.52 * x - 0.48 * y, 0.52 * y - 0.48 * x),
            Benchmark::Dropwave => {
                let r2 = x * x + y * y;
                let r = r2.sqrt();
                let sinc = if r > 0.0 { (12.0 * r).sin() / r } else { 12.0 };
                let num = 1.0 + (12.0 * r).cos();
                let den = 0.5 * r2 + 2.0;
                let k = 12.0 * sinc / den + num / (den * den);
                (x * k, y * k)
            }
            Benchmark::Levy => {
                let (w1, w2) = (1.0 + (x - 1.0) / 4.0, 1.0 + (y - 1.0) / 4.0);
                let a = PI * w1 + 1.0;
                let d1 = 2.0 * PI * (PI * w1).sin() * (PI * w1).cos()
                    + 2.0 * (w1 - 1.0) * (1.0 + 10.0 * a.sin().powi(2))
                    + (w1 - 1.0).powi(2) * 20.0 * PI * a.sin() * a.cos();
                let b = 2.0 * PI * w2;
                let d2 = 2.0 * (w2 - 1.0) * (1.0 + b.sin().powi(2))
                    + (w2 - 1.0).powi(2) * 4.0 * PI * b.sin() * b.cos();
                (d1 / 4.0, d2 / 4.0)
            }
        };
        vec![gx, gy]
    }
}

fn gp_first(x: f64, y: f64) -> (f64, f64) {
    let s = x + y + 1.0;
    (s, 19.0 - 14.0 * x + 3.0 * x * x - 14.0 * y + 6.0 * x * y + 3.0 * y * y)
}

fn gp_second(x: f64, y: f64) -> (f64, f64) {
    let d = 2.0 * x - 3.0 * y;
    (d, 18.0 - 32.0 * x + 12.0 * x * x + 48.0 * y - 36.0 * x * y + 27.0 * y * y)
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        let key = match key.as_str() {
            "goldsteinprice" => "goldstein_price",
            "threehumpcamel" | "camel" => "three_hump_camel",
            "drop_wave" => "dropwave",
            other => other,
        }
        .to_string();
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == key)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}
