//! Explicit Runge–Kutta 8(5,3) of Dormand–Prince with 7th-order dense output,
//! following Hairer's DOP853, on complex state vectors.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

type C = Complex64;

const UROUND: f64 = 2.3e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

/// An accepted step `[t_old, t]` with its continuous extension.
pub struct DenseStep<'a> {
    pub t_old: f64,
    pub t: f64,
    pub y: &'a [C],
    h: f64,
    cont: &'a [Vec<C>; 8],
}

impl DenseStep<'_> {
    pub fn interpolate_into(&self, t: f64, out: &mut [C]) {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        let c = self.cont;
        for i in 0..out.len() {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
    }

    pub fn interpolate(&self, t: f64) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); self.y.len()];
        self.interpolate_into(t, &mut out);
        out
    }
}

fn combo(out: &mut [C], y: &[C], h: f64, terms: &[(f64, &[C])]) {
    for i in 0..out.len() {
        let mut acc = C::new(0.0, 0.0);
        for (a, k) in terms {
            acc += k[i] * *a;
        }
        out[i] = y[i] + acc * h;
    }
}

fn lin(out: &mut [C], terms: &[(f64, &[C])]) {
    for i in 0..out.len() {
        let mut acc = C::new(0.0, 0.0);
        for (a, k) in terms {
            acc += k[i] * *a;
        }
        out[i] = acc;
    }
}

fn scaled_norm(v: &[C], y: &[C], atol: f64, rtol: f64) -> f64 {
    let mut s = 0.0;
    for (x, y) in v.iter().zip(y) {
        let sr = atol + rtol * libm::fabs(y.re);
        let si = atol + rtol * libm::fabs(y.im);
        s += (x.re / sr) * (x.re / sr) + (x.im / si) * (x.im / si);
    }
    libm::sqrt(s / (2 * v.len()).max(1) as f64)
}

fn is_finite(v: &[C]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end > t0`. `observer` sees every
/// accepted step and may stop the integration early by returning `false`.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[C],
    t_end: f64,
    opts: &Options,
    mut observer: O,
) -> Result<Stats>
where
    F: FnMut(f64, &[C], &mut [C]),
    O: FnMut(&DenseStep<'_>) -> bool,
{
    if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidIntegration("t_end must exceed t0"));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidIntegration("tolerances must be positive"));
    }
    let n = y0.len();
    let z = || vec![C::new(0.0, 0.0); n];
    let (mut k1, mut k2, mut k3, mut k4, mut k5) = (z(), z(), z(), z(), z());
    let (mut k6, mut k7, mut k8, mut k9, mut k10) = (z(), z(), z(), z(), z());
    let mut y = y0.to_vec();
    let mut y1 = z();
    let mut yy = z();
    let mut cont: [Vec<C>; 8] = core::array::from_fn(|_| z());
    let mut stats = Stats::default();
    let (rtol, atol) = (opts.rtol, opts.atol);
    let h_max = opts.h_max.min(t_end - t0);

    let mut t = t0;
    f(t, &y, &mut k1);
    stats.evals += 1;

    let mut h = match opts.h_init {
        Some(h) if h > 0.0 => h.min(h_max),
        _ => {
            let d0 = scaled_norm(&y, &y, atol, rtol);
            let d1 = scaled_norm(&k1, &y, atol, rtol);
            let h0 = if d0 < 1e-10 || d1 < 1e-10 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
            .min(h_max);
            combo(&mut y1, &y, h0, &[(1.0, &k1)]);
            f(t + h0, &y1, &mut k2);
            stats.evals += 1;
            for i in 0..n {
                k3[i] = k2[i] - k1[i];
            }
            let d2 = scaled_norm(&k3, &y, atol, rtol) / h0;
            let d = d1.max(d2);
            let h1 = if d <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                libm::pow(0.01 / d, 1.0 / 8.0)
            };
            (100.0 * h0).min(h1).min(h_max)
        }
    };

    let expo1 = 1.0 / 8.0;
    let safe = 0.9f64;
    let facc1 = 1.0f64 / 0.333;
    let facc2 = 1.0f64 / 6.0;
    let mut last = false;
    let mut reject = false;
    let mut steps = 0usize;

    loop {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { t, state: y });
        }
        if 0.1 * libm::fabs(h) <= libm::fabs(t) * UROUND || !(h > 0.0) {
            return Err(Error::StepSizeUnderflow { t, state: y });
        }
        if t + 1.01 * h - t_end > 0.0 {
            h = t_end - t;
            last = true;
        }
        steps += 1;

        combo(&mut yy, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &yy, &mut k2);
        combo(&mut yy, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &yy, &mut k3);
        combo(&mut yy, &y, h, &[(A41, &k1), (A43, &k3)]);
        f(t + C4 * h, &yy, &mut k4);
        combo(&mut yy, &y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &yy, &mut k5);
        combo(&mut yy, &y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]);
        f(t + C6 * h, &yy, &mut k6);
        combo(
            &mut yy,
            &y,
            h,
            &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        f(t + C7 * h, &yy, &mut k7);
        combo(
            &mut yy,
            &y,
            h,
            &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)],
        );
        f(t + C8 * h, &yy, &mut k8);
        combo(
            &mut yy,
            &y,
            h,
            &[
                (A91, &k1),
                (A94, &k4),
                (A95, &k5),
                (A96, &k6),
                (A97, &k7),
                (A98, &k8),
            ],
        );
        f(t + C9 * h, &yy, &mut k9);
        combo(
            &mut yy,
            &y,
            h,
            &[
                (A101, &k1),
                (A104, &k4),
                (A105, &k5),
                (A106, &k6),
                (A107, &k7),
                (A108, &k8),
                (A109, &k9),
            ],
        );
        f(t + C10 * h, &yy, &mut k10);
        combo(
            &mut yy,
            &y,
            h,
            &[
                (A111, &k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        );
        f(t + C11 * h, &yy, &mut k2);
        let t_new = t + h;
        combo(
            &mut y1,
            &y,
            h,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k2),
            ],
        );
        f(t_new, &y1, &mut k3);
        lin(
            &mut k4,
            &[
                (B1, &k1),
                (B6, &k6),
                (B7, &k7),
                (B8, &k8),
                (B9, &k9),
                (B10, &k10),
                (B11, &k2),
                (B12, &k3),
            ],
        );
        combo(&mut k5, &y, h, &[(1.0, &k4)]);
        stats.evals += 11;

        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..n {
            let e2 = k4[i] - k1[i] * BHH1 - k9[i] * BHH2 - k3[i] * BHH3;
            let e = k1[i] * ER1
                + k6[i] * ER6
                + k7[i] * ER7
                + k8[i] * ER8
                + k9[i] * ER9
                + k10[i] * ER10
                + k2[i] * ER11
                + k3[i] * ER12;
            let sr = atol + rtol * libm::fabs(y[i].re).max(libm::fabs(k5[i].re));
            let si = atol + rtol * libm::fabs(y[i].im).max(libm::fabs(k5[i].im));
            err2 += (e2.re / sr) * (e2.re / sr) + (e2.im / si) * (e2.im / si);
            err += (e.re / sr) * (e.re / sr) + (e.im / si) * (e.im / si);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = libm::fabs(h) * err * libm::sqrt(1.0 / (deno * (2 * n).max(1) as f64));
        let err = if err.is_finite() && is_finite(&k5) {
            err
        } else {
            f64::INFINITY
        };

        let fac11 = libm::pow(err, expo1);
        let fac = facc2.max(facc1.min(fac11 / safe));
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted += 1;
            // k4 <- f(t_new, y_new)
            let mut fnew = z();
            f(t_new, &k5, &mut fnew);
            stats.evals += 1;

            let ydiff: Vec<C> = (0..n).map(|i| k5[i] - y[i]).collect();
            for i in 0..n {
                let bspl = k1[i] * h - ydiff[i];
                cont[0][i] = y[i];
                cont[1][i] = ydiff[i];
                cont[2][i] = bspl;
                cont[3][i] = ydiff[i] - fnew[i] * h - bspl;
            }
            lin(
                &mut cont[4],
                &[
                    (D41, &k1),
                    (D46, &k6),
                    (D47, &k7),
                    (D48, &k8),
                    (D49, &k9),
                    (D410, &k10),
                    (D411, &k2),
                    (D412, &k3),
                ],
            );
            lin(
                &mut cont[5],
                &[
                    (D51, &k1),
                    (D56, &k6),
                    (D57, &k7),
                    (D58, &k8),
                    (D59, &k9),
                    (D510, &k10),
                    (D511, &k2),
                    (D512, &k3),
                ],
            );
            lin(
                &mut cont[6],
                &[
                    (D61, &k1),
                    (D66, &k6),
                    (D67, &k7),
                    (D68, &k8),
                    (D69, &k9),
                    (D610, &k10),
                    (D611, &k2),
                    (D612, &k3),
                ],
            );
            lin(
                &mut cont[7],
                &[
                    (D71, &k1),
                    (D76, &k6),
                    (D77, &k7),
                    (D78, &k8),
                    (D79, &k9),
                    (D710, &k10),
                    (D711, &k2),
                    (D712, &k3),
                ],
            );
            combo(
                &mut yy,
                &y,
                h,
                &[
                    (A141, &k1),
                    (A147, &k7),
                    (A148, &k8),
                    (A149, &k9),
                    (A1410, &k10),
                    (A1411, &k2),
                    (A1412, &k3),
                    (A1413, &fnew),
                ],
            );
            f(t + C14 * h, &yy, &mut k10);
            combo(
                &mut yy,
                &y,
                h,
                &[
                    (A151, &k1),
                    (A156, &k6),
                    (A157, &k7),
                    (A158, &k8),
                    (A1511, &k2),
                    (A1512, &k3),
                    (A1513, &fnew),
                    (A1514, &k10),
                ],
            );
            f(t + C15 * h, &yy, &mut k2);
            combo(
                &mut yy,
                &y,
                h,
                &[
                    (A161, &k1),
                    (A166, &k6),
                    (A167, &k7),
                    (A168, &k8),
                    (A169, &k9),
                    (A1613, &fnew),
                    (A1614, &k10),
                    (A1615, &k2),
                ],
            );
            f(t + C16 * h, &yy, &mut k3);
            stats.evals += 3;
            for i in 0..n {
                cont[4][i] =
                    (cont[4][i] + fnew[i] * D413 + k10[i] * D414 + k2[i] * D415 + k3[i] * D416) * h;
                cont[5][i] =
                    (cont[5][i] + fnew[i] * D513 + k10[i] * D514 + k2[i] * D515 + k3[i] * D516) * h;
                cont[6][i] =
                    (cont[6][i] + fnew[i] * D613 + k10[i] * D614 + k2[i] * D615 + k3[i] * D616) * h;
                cont[7][i] =
                    (cont[7][i] + fnew[i] * D713 + k10[i] * D714 + k2[i] * D715 + k3[i] * D716) * h;
            }

            k1.copy_from_slice(&fnew);
            y.copy_from_slice(&k5);
            let t_old = t;
            t = if last { t_end } else { t_new };

            let step = DenseStep {
                t_old,
                t,
                y: &y,
                h,
                cont: &cont,
            };
            if !observer(&step) || last {
                return Ok(stats);
            }
            if reject {
                h_new = h_new.min(h);
            }
            reject = false;
        } else {
            h_new = h / facc1.min(fac11 / safe);
            reject = true;
            last = false;
            stats.rejected += 1;
        }
        h = h_new.min(h_max);
    }
}

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const A141: f64 = 5.61675022830479523392909219681E-2;
const A147: f64 = 2.53500210216624811088794765333E-1;
const A148: f64 = -2.46239037470802489917441475441E-1;
const A149: f64 = -1.24191423263816360469010140626E-1;
const A1410: f64 = 1.5329179827876569731206322685E-1;
const A1411: f64 = 8.20105229563468988491666602057E-3;
const A1412: f64 = 7.56789766054569976138603589584E-3;
const A1413: f64 = -8.298E-3;
const A151: f64 = 3.18346481635021405060768473261E-2;
const A156: f64 = 2.83009096723667755288322961402E-2;
const A157: f64 = 5.35419883074385676223797384372E-2;
const A158: f64 = -5.49237485713909884646569340306E-2;
const A1511: f64 = -1.08347328697249322858509316994E-4;
const A1512: f64 = 3.82571090835658412954920192323E-4;
const A1513: f64 = -3.40465008687404560802977114492E-4;
const A1514: f64 = 1.41312443674632500278074618366E-1;
const A161: f64 = -4.28896301583791923408573538692E-1;
const A166: f64 = -4.69762141536116384314449447206E0;
const A167: f64 = 7.68342119606259904184240953878E0;
const A168: f64 = 4.06898981839711007970213554331E0;
const A169: f64 = 3.56727187455281109270669543021E-1;
const A1613: f64 = -1.39902416515901462129418009734E-3;
const A1614: f64 = 2.9475147891527723389556272149E0;
const A1615: f64 = -9.15095847217987001081870187138E0;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const C14: f64 = 0.1E+00;
const C15: f64 = 0.2E+00;
const C16: f64 = 0.777777777777777777777777777778E+00;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const D41: f64 = -0.84289382761090128651353491142E+01;
const D46: f64 = 0.56671495351937776962531783590E+00;
const D47: f64 = -0.30689499459498916912797304727E+01;
const D48: f64 = 0.23846676565120698287728149680E+01;
const D49: f64 = 0.21170345824450282767155149946E+01;
const D410: f64 = -0.87139158377797299206789907490E+00;
const D411: f64 = 0.22404374302607882758541771650E+01;
const D412: f64 = 0.63157877876946881815570249290E+00;
const D413: f64 = -0.88990336451333310820698117400E-01;
const D414: f64 = 0.18148505520854727256656404962E+02;
const D415: f64 = -0.91946323924783554000451984436E+01;
const D416: f64 = -0.44360363875948939664310572000E+01;
const D51: f64 = 0.10427508642579134603413151009E+02;
const D56: f64 = 0.24228349177525818288430175319E+03;
const D57: f64 = 0.16520045171727028198505394887E+03;
const D58: f64 = -0.37454675472269020279518312152E+03;
const D59: f64 = -0.22113666853125306036270938578E+02;
const D510: f64 = 0.77334326684722638389603898808E+01;
const D511: f64 = -0.30674084731089398182061213626E+02;
const D512: f64 = -0.93321305264302278729567221706E+01;
const D513: f64 = 0.15697238121770843886131091075E+02;
const D514: f64 = -0.31139403219565177677282850411E+02;
const D515: f64 = -0.93529243588444783865713862664E+01;
const D516: f64 = 0.35816841486394083752465898540E+02;
const D61: f64 = 0.19985053242002433820987653617E+02;
const D66: f64 = -0.38703730874935176555105901742E+03;
const D67: f64 = -0.18917813819516756882830838328E+03;
const D68: f64 = 0.52780815920542364900561016686E+03;
const D69: f64 = -0.11573902539959630126141871134E+02;
const D610: f64 = 0.68812326946963000169666922661E+01;
const D611: f64 = -0.10006050966910838403183860980E+01;
const D612: f64 = 0.77771377980534432092869265740E+00;
const D613: f64 = -0.27782057523535084065932004339E+01;
const D614: f64 = -0.60196695231264120758267380846E+02;
const D615: f64 = 0.84320405506677161018159903784E+02;
const D616: f64 = 0.11992291136182789328035130030E+02;
const D71: f64 = -0.25693933462703749003312586129E+02;
const D76: f64 = -0.15418974869023643374053993627E+03;
const D77: f64 = -0.23152937917604549567536039109E+03;
const D78: f64 = 0.35763911791061412378285349910E+03;
const D79: f64 = 0.93405324183624310003907691704E+02;
const D710: f64 = -0.37458323136451633156875139351E+02;
const D711: f64 = 0.10409964950896230045147246184E+03;
const D712: f64 = 0.29840293426660503123344363579E+02;
const D713: f64 = -0.43533456590011143754432175058E+02;
const D714: f64 = 0.96324553959188282948394950600E+02;
const D715: f64 = -0.39177261675615439165231486172E+02;
const D716: f64 = -0.14972683625798562581422125276E+03;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_exact_to_tolerance() {
        // y' = i y, y(0) = 1.
        let mut max_err: f64 = 0.0;
        let mut dense_err: f64 = 0.0;
        let stats = integrate(
            |_, y, d| d[0] = C::new(0.0, 1.0) * y[0],
            0.0,
            &[C::new(1.0, 0.0)],
            20.0,
            &Options::with_tol(1e-12),
            |s| {
                let e = (s.y[0] - C::new(0.0, s.t).exp()).norm();
                max_err = max_err.max(e);
                let tm = 0.5 * (s.t_old + s.t);
                let e = (s.interpolate(tm)[0] - C::new(0.0, tm).exp()).norm();
                dense_err = dense_err.max(e);
                true
            },
        )
        .unwrap();
        assert!(max_err < 1e-10, "{max_err}");
        assert!(dense_err < 1e-10, "{dense_err}");
        assert!(stats.accepted > 10);
    }

    #[test]
    fn ends_exactly_at_t_end() {
        let mut t_last = 0.0;
        integrate(
            |t, _, d| d[0] = C::new(t.cos(), 0.0),
            0.0,
            &[C::new(0.0, 0.0)],
            3.3,
            &Options::default(),
            |s| {
                t_last = s.t;
                true
            },
        )
        .unwrap();
        assert_eq!(t_last, 3.3);
    }

    #[test]
    fn blow_up_reports_last_state() {
        // y' = y², y(0) = 1 explodes at t = 1.
        let r = integrate(
            |_, y, d| d[0] = y[0] * y[0],
            0.0,
            &[C::new(1.0, 0.0)],
            2.0,
            &Options::with_tol(1e-8),
            |_| true,
        );
        match r {
            Err(Error::StepSizeUnderflow { t, state }) => {
                assert!(t > 0.99 && t < 1.001, "{t}");
                assert!(state[0].re > 1e3);
            }
            Err(Error::TooManySteps { t, .. }) => panic!("too many steps at {t}"),
            Ok(_) => panic!("integrated through the singularity"),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let f = |_: f64, _: &[C], _: &mut [C]| {};
        assert!(integrate(f, 0.0, &[], 0.0, &Options::default(), |_| true).is_err());
        let o = Options {
            rtol: 0.0,
            ..Options::default()
        };
        assert!(integrate(f, 0.0, &[], 1.0, &o, |_| true).is_err());
    }
}
