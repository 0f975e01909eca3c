//! Dormand-Prince 8(5,3) for `y'' = q(z) y` along a straight segment of the
//! complex plane, with the state rescaled as it grows.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 12] = [
    0.0,
    5.260_015_195_876_773e-2,
    7.890_022_793_815_16e-2,
    1.183_503_419_072_274e-1,
    2.816_496_580_927_726e-1,
    3.333_333_333_333_333e-1,
    0.25,
    3.076_923_076_923_077e-1,
    6.512_820_512_820_513e-1,
    0.6,
    8.571_428_571_428_571e-1,
    1.0,
];

const A: [[f64; 11]; 12] = [
    [0.0; 11],
    [5.260_015_195_876_773e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.972_505_698_453_79e-2, 5.917_517_095_361_37e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.958_758_547_680_685e-2, 0.0, 8.876_275_643_042_054e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        2.413_651_341_592_667e-1,
        0.0,
        -8.845_494_793_282_861e-1,
        9.248_340_032_617_92e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.703_703_703_703_703_5e-2,
        0.0,
        0.0,
        1.708_286_087_294_738_6e-1,
        1.254_676_875_668_224_2e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.710_937_5e-2,
        0.0,
        0.0,
        1.702_522_110_195_440_5e-1,
        6.021_653_898_045_596e-2,
        -1.757_812_5e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709_200_011_850_479e-2,
        0.0,
        0.0,
        1.703_839_257_122_399_8e-1,
        1.072_620_304_463_732_8e-1,
        -1.531_943_774_862_440_2e-2,
        8.273_789_163_814_023e-3,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241_109_587_160_757e-1,
        0.0,
        0.0,
        -3.360_892_629_446_941_4,
        -8.682_193_468_417_26e-1,
        2.759_209_969_944_671e1,
        2.015_406_755_047_789_4e1,
        -4.348_988_418_106_996e1,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.776_625_364_382_643_4e-1,
        0.0,
        0.0,
        -2.488_114_619_971_667_7,
        -5.902_908_268_368_43e-1,
        2.123_005_144_818_119_3e1,
        1.527_923_363_288_242_3e1,
        -3.328_821_096_898_486e1,
        -2.033_120_170_850_862_7e-2,
        0.0,
        0.0,
    ],
    [
        -9.371_424_300_859_873e-1,
        0.0,
        0.0,
        5.186_372_428_844_064,
        1.091_437_348_996_729_5,
        -8.149_787_010_746_927,
        -1.852_006_565_999_696e1,
        2.273_948_709_935_050_5e1,
        2.493_605_552_679_652_3,
        -3.046_764_471_898_219_6,
        0.0,
    ],
    [
        2.273_310_147_516_538,
        0.0,
        0.0,
        -1.053_449_546_673_725e1,
        -2.000_872_058_224_862_5,
        -1.795_893_186_311_88e1,
        2.794_888_452_941_996e1,
        -2.858_998_277_135_023_5,
        -8.872_856_933_530_63,
        1.236_056_717_579_430_3e1,
        6.433_927_460_157_636e-1,
    ],
];

const B: [f64; 12] = [
    5.429_373_411_656_876_5e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199e-1,
    -1.521_609_496_625_161e-1,
    2.013_654_008_040_303_4e-1,
    4.471_061_572_777_259e-2,
];

const ER: [f64; 12] = [
    1.312_004_499_419_488e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502e-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6e-1,
    3.341_791_187_130_175e-1,
    8.192_320_648_511_571e-2,
    -2.235_530_786_388_629_4e-2,
];

const BHH: [f64; 3] = [
    2.440_944_881_889_764e-1,
    7.338_466_882_816_118e-1,
    2.205_882_352_941_176_6e-2,
];

/// `[y, y']`.
pub type State = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            max_steps: 200_000,
        }
    }
}

/// End state, to be multiplied by `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagated {
    pub state: State,
    pub log_scale: Complex64,
    pub steps: usize,
    pub rejected: usize,
}

impl Propagated {
    pub fn value(&self) -> State {
        let s = self.log_scale.exp();
        [self.state[0] * s, self.state[1] * s]
    }
}

const RESCALE_ABOVE: f64 = 1e100;

/// Integrates `y'' = q(z) y` from `from` to `to` along the straight segment,
/// starting from `start * exp(log_scale)`.
pub fn integrate_segment<Q>(
    q: &Q,
    from: Complex64,
    to: Complex64,
    start: State,
    log_scale: Complex64,
    opts: &IntegratorOptions,
) -> Result<Propagated>
where
    Q: Fn(Complex64) -> Complex64,
{
    let span = to - from;
    let rhs = |t: f64, y: &State| -> State {
        let z = from + span * t;
        [span * y[1], span * q(z) * y[0]]
    };
    let size = |y: &State, z: Complex64| -> (f64, f64) {
        let root = 1.0 + q(z).norm().sqrt();
        let n = y[0].norm().max(y[1].norm() / root);
        (n, n * root)
    };

    let mut y = start;
    let mut log_scale = log_scale;
    let mut t = 0.0;
    let mut h = (0.05 / (span.norm() * (1.0 + q(from).norm().sqrt()))).min(0.1);
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 12];
    k[0] = rhs(0.0, &y);
    let mut steps = 0;
    let mut rejected = 0;

    while t < 1.0 {
        if steps + rejected > opts.max_steps {
            return Err(Error::Integration {
                location: (from + span * t).to_string(),
                reason: format!("step limit {} reached", opts.max_steps),
            });
        }
        let last = t + h >= 1.0;
        if last {
            h = 1.0 - t;
        }
        for s in 1..12 {
            let mut acc = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    acc[0] += kj[0] * (a * h);
                    acc[1] += kj[1] * (a * h);
                }
            }
            k[s] = rhs(t + C[s] * h, &acc);
        }
        let mut incr = [Complex64::new(0.0, 0.0); 2];
        let mut e5 = [Complex64::new(0.0, 0.0); 2];
        for s in 0..12 {
            for i in 0..2 {
                incr[i] += k[s][i] * B[s];
                e5[i] += k[s][i] * ER[s];
            }
        }
        let y_new = [y[0] + incr[0] * h, y[1] + incr[1] * h];
        let z_new = from + span * (t + h);
        let (n0, n1) = size(&y, from + span * t);
        let (m0, m1) = size(&y_new, z_new);
        let scales = [opts.rtol * n0.max(m0), opts.rtol * n1.max(m1)];
        let (mut err5, mut err3) = (0.0, 0.0);
        for i in 0..2 {
            let e3 = incr[i] - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
            err5 += (e5[i].norm() / scales[i]).powi(2);
            err3 += (e3.norm() / scales[i]).powi(2);
        }
        let mut deno = err5 + 0.01 * err3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err5 / (deno * 2.0).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration {
                location: (from + span * t).to_string(),
                reason: "non-finite error estimate".into(),
            });
        }
        let fac = (err.powf(0.125) / 0.9).clamp(1.0 / 6.0, 3.0);
        let h_new = h / fac;
        if err <= 1.0 {
            t = if last { 1.0 } else { t + h };
            y = y_new;
            steps += 1;
            let big = y[0].norm().max(y[1].norm());
            if big > RESCALE_ABOVE || (big < 1.0 / RESCALE_ABOVE && big > 0.0) {
                let s = big.ln();
                y = [y[0] / big, y[1] / big];
                log_scale += s;
            }
            k[0] = rhs(t, &y);
            h = h_new;
        } else {
            rejected += 1;
            h = h_new.min(h);
            if h < 1e-14 {
                return Err(Error::Integration {
                    location: (from + span * t).to_string(),
                    reason: "step size underflow".into(),
                });
            }
        }
    }
    Ok(Propagated {
        state: y,
        log_scale,
        steps,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_and_exponential() {
        let opts = IntegratorOptions::default();
        // y'' = -y, y(0) = 0, y'(0) = 1 gives sin
        let q = |_z: Complex64| c(-1.0, 0.0);
        let p = integrate_segment(&q, c(0.0, 0.0), c(10.0, 0.0), [c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0), &opts)
            .unwrap();
        let v = p.value();
        assert!((v[0] - c(10f64.sin(), 0.0)).norm() < 1e-11);
        assert!((v[1] - c(10f64.cos(), 0.0)).norm() < 1e-11);

        // y'' = y along a complex segment: exp(z), with rescaling far out
        let q = |_z: Complex64| c(1.0, 0.0);
        let to = c(400.0, 3.0);
        let p = integrate_segment(&q, c(0.0, 0.0), to, [c(1.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0), &opts).unwrap();
        let log_y = p.log_scale + p.state[0].ln();
        assert!((log_y - to).norm() < 1e-9, "{log_y}");
    }

    #[test]
    fn airy_wronskian_is_conserved() {
        // y'' = z y; the Wronskian of two solutions is constant
        let q = |z: Complex64| z;
        let opts = IntegratorOptions::default();
        let (from, to) = (c(0.0, 0.0), c(2.0, 1.5));
        let a = integrate_segment(&q, from, to, [c(1.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0), &opts).unwrap().value();
        let b = integrate_segment(&q, from, to, [c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0), &opts).unwrap().value();
        let w = a[0] * b[1] - a[1] * b[0];
        assert!((w - c(1.0, 0.0)).norm() < 1e-11, "{w}");
    }
}
