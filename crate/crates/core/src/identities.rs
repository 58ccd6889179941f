//! Seeded verification of the tensor identities of the nearly Kähler structure.
//!
//! Each check reports the largest residual seen. Frame checks are exact table
//! algebra; sampled checks draw random points and tangent vectors.

use serde::Serialize;

use crate::nkspace::{
    apply_j, apply_p, apply_q, conn_constant, connection, curvature_r, frame, frame_bracket,
    hermitian_constant, metric_g_hermitian, metric_g_unchecked as g, nabla_g_frame, tensor_g, tensor_h, FrameVector, Isometry, Point, Tangent, SQRT3,
};
use crate::sampling::Sampler;

/// Threshold for exact frame-table checks.
pub const FRAME_TOL: f64 = 1e-12;
/// Threshold for checks on sampled tangent vectors.
pub const SAMPLED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub seed: u64,
    pub j_perturbation: f64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    /// Test hook: the `U` slot of `JZ` is scaled by `1 + j_perturbation`.
    pub j_perturbation: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { samples: 1000, seed: 42, j_perturbation: 0.0 }
    }
}

struct Suite {
    checks: Vec<IdentityCheck>,
}

impl Suite {
    fn record(&mut self, name: &'static str, threshold: f64, residuals: impl IntoIterator<Item = f64>) {
        let max_residual = residuals.into_iter().fold(0.0f64, |m, r| if r.is_nan() { f64::NAN } else { m.max(r) });
        self.checks.push(IdentityCheck {
            name,
            max_residual,
            threshold,
            passed: max_residual <= threshold,
        });
    }
}

fn tdist(a: &Tangent, b: &Tangent) -> f64 {
    a.distance(b)
}

fn fdist(a: &FrameVector, b: &FrameVector) -> f64 {
    (*a - *b).max_abs()
}

/// Frame-exact curvature `R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_{[X,Y]}Z` on basis fields.
pub fn structure_curvature(a: usize, b: usize, c: usize) -> FrameVector {
    let (xa, xb, xc) = (FrameVector::basis(a), FrameVector::basis(b), FrameVector::basis(c));
    conn_constant(&xa, &connection(b, c)) - conn_constant(&xb, &connection(a, c))
        - conn_constant(&frame_bracket(a, b), &xc)
}

/// Runs every identity check.
pub fn verify(cfg: &VerifyConfig) -> IdentityReport {
    let mut suite = Suite { checks: Vec::new() };
    if cfg.samples > 0 {
        frame_checks(&mut suite, cfg);
        sampled_checks(&mut suite, cfg);
    }
    IdentityReport {
        samples: cfg.samples,
        seed: cfg.seed,
        j_perturbation: cfg.j_perturbation,
        checks: suite.checks,
    }
}

fn frame_checks(suite: &mut Suite, cfg: &VerifyConfig) {
    let mut rng = Sampler::new(cfg.seed ^ 0x5eed_f4a3);
    let mut table = Vec::new();
    for _ in 0..cfg.samples.min(100) {
        let fr = frame(rng.point());
        for a in 0..6 {
            for b in 0..6 {
                let want = if a % 3 != b % 3 {
                    0.0
                } else if (a < 3) == (b < 3) {
                    4.0 / 3.0
                } else {
                    -2.0 / 3.0
                };
                table.push((g(&fr[a], &fr[b]) - want).abs());
            }
        }
    }
    suite.record("frame_metric_table", FRAME_TOL, table);

    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|a| (0..6).map(move |b| (a, b))).collect();
    suite.record(
        "connection_torsion_free",
        FRAME_TOL,
        pairs.iter().map(|&(a, b)| fdist(&(connection(a, b) - connection(b, a)), &frame_bracket(a, b))),
    );
    let mut compat = Vec::new();
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                let (xb, xc) = (FrameVector::basis(b), FrameVector::basis(c));
                compat.push((connection(a, b).g(&xc) + xb.g(&connection(a, c))).abs());
            }
        }
    }
    suite.record("connection_metric_compatible", FRAME_TOL, compat);

    let mut curv = Vec::new();
    let base = Point::IDENTITY;
    let fr = frame(base);
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                let formula = curvature_r(&fr[a], &fr[b], &fr[c]).expect("same base").to_frame();
                curv.push(fdist(&formula, &structure_curvature(a, b, c)));
            }
        }
    }
    suite.record("curvature_structure_oracle", FRAME_TOL, curv);

    suite.record(
        "hermitian_nabla_j",
        FRAME_TOL,
        pairs.iter().map(|&(a, b)| {
            let (x, y) = (FrameVector::basis(a), FrameVector::basis(b));
            (hermitian_constant(&x, &y.j()) - hermitian_constant(&x, &y).j()).max_abs()
        }),
    );
    suite.record(
        "hermitian_nabla_p",
        FRAME_TOL,
        pairs.iter().map(|&(a, b)| {
            let (x, y) = (FrameVector::basis(a), FrameVector::basis(b));
            (hermitian_constant(&x, &y.p()) - hermitian_constant(&x, &y).p()).max_abs()
        }),
    );
}

fn sampled_checks(suite: &mut Suite, cfg: &VerifyConfig) {
    let mut rng = Sampler::new(cfg.seed);
    let jscale = 1.0 + cfg.j_perturbation;
    let j = |z: &Tangent| {
        let mut t = apply_j(z);
        t.u = t.u * jscale;
        t
    };

    let n = cfg.samples;
    let mut r: std::collections::BTreeMap<&'static str, Vec<f64>> = Default::default();
    let mut push = |name: &'static str, v: f64| r.entry(name).or_default().push(v);

    for _ in 0..n {
        let x = rng.tangent();
        let base = x.base;
        let y = rng.tangent_at(base);
        let z = rng.tangent_at(base);
        let w = rng.tangent_at(base);
        let gg = |a: &Tangent, b: &Tangent| g(a, b);
        let gt = |a: &Tangent, b: &Tangent| tensor_g(a, b).expect("same base");
        let ht = |a: &Tangent, b: &Tangent| tensor_h(a, b).expect("same base");
        let (jx, jy, jz) = (j(&x), j(&y), j(&z));
        let (px, py) = (apply_p(&x), apply_p(&y));

        push("j_squared", tdist(&j(&jx), &(-x)));
        push("g_j_compatible", (gg(&jx, &jy) - gg(&x, &y)).abs());
        push("g_p_compatible", (gg(&px, &py) - gg(&x, &y)).abs());
        push("p_squared", tdist(&apply_p(&px), &x));
        push("q_squared", tdist(&apply_q(&apply_q(&x)), &x));
        push("pj_anticommute", tdist(&apply_p(&jx), &(-j(&px))));
        push(
            "metric_forms_agree",
            (gg(&x, &y) - metric_g_hermitian(&x, &y).expect("same base")).abs(),
        );
        push(
            "qj_from_p",
            tdist(&apply_q(&jx), &((apply_p(&x) * (-2.0) + x) * (1.0 / SQRT3))),
        );
        let euclid = 8.0 / 3.0 * x.euclidean(&y);
        push("q_compatible_product_metric", (gg(&apply_q(&x), &apply_q(&y)) + gg(&x, &y) - euclid).abs());

        let gxy = gt(&x, &y);
        push("g_skew", tdist(&(gxy + gt(&y, &x)), &Tangent::zero(base)));
        push("g_j_linear", tdist(&(gt(&x, &jy) + j(&gxy)), &Tangent::zero(base)));
        push("g_metric_skew", (gg(&gxy, &z) + gg(&gt(&x, &z), &y)).abs());

        let (xf, yf, zf) = (x.to_frame(), y.to_frame(), z.to_frame());
        let nabla_j = hermitian_constant(&xf, &yf.j()) - hermitian_constant(&xf, &yf).j();
        push("hermitian_nabla_j_sampled", nabla_j.max_abs());

        push("pg_plus_g_pp", tdist(&(apply_p(&gxy) + gt(&px, &py)), &Tangent::zero(base)));
        let hxy = ht(&x, &y);
        push("h_j_linear", tdist(&ht(&x, &jy), &j(&hxy)));
        push("g_p_relation", tdist(&(gt(&x, &py) + apply_p(&gxy)), &(j(&hxy) * (-2.0))));
        push("h_p_anticommute", tdist(&(ht(&x, &py) + apply_p(&hxy)), &Tangent::zero(base)));
        push("h_p_first_slot", tdist(&(hxy + ht(&px, &y)), &Tangent::zero(base)));
        let nabla_p = hermitian_constant(&xf, &yf.p()) - hermitian_constant(&xf, &yf).p();
        push("hermitian_nabla_p_sampled", nabla_p.max_abs());

        let lhs_ng = nabla_g_frame(&xf, &yf, &zf).at(base);
        let rhs_ng = (jy * gg(&x, &z) - jz * gg(&x, &y) - x * gg(&jy, &z)) * (1.0 / 3.0);
        push("nabla_g_closed_form", tdist(&lhs_ng, &rhs_ng));

        let lhs_q = gg(&gxy, &gt(&z, &w));
        let jw = j(&w);
        let rhs_q = (gg(&x, &z) * gg(&y, &w) - gg(&x, &w) * gg(&y, &z) + gg(&jx, &z) * gg(&jw, &y)
            - gg(&jx, &w) * gg(&jz, &y))
            / 3.0;
        push("g_inner_product_quartic", (lhs_q - rhs_q).abs());

        // Curvature closed form against the structure-constant oracle, extended trilinearly.
        let mut oracle = FrameVector::ZERO;
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let coeff = xf[a] * yf[b] * zf[c];
                    oracle = oracle + structure_curvature(a, b, c) * coeff;
                }
            }
        }
        let formula = curvature_r(&x, &y, &z).expect("same base").to_frame();
        push("curvature_sampled", fdist(&formula, &oracle));

        let iso = Isometry::from_units(rng.unit_quaternion(), rng.unit_quaternion(), rng.unit_quaternion());
        let (fx, fy) = (iso.push_forward(&x), iso.push_forward(&y));
        push("isometry_metric", (gg(&fx, &fy) - gg(&x, &y)).abs());
        push("isometry_j", tdist(&j(&fx), &iso.push_forward(&jx)));
    }
    for (name, values) in r {
        suite.record(name, SAMPLED_TOL, values);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let rep = verify(&VerifyConfig { samples: 200, ..Default::default() });
        for c in &rep.checks {
            assert!(c.passed, "{} = {:e}", c.name, c.max_residual);
        }
        assert!(rep.checks.len() > 20);
    }

    #[test]
    fn zero_samples_gives_empty_report() {
        let rep = verify(&VerifyConfig { samples: 0, ..Default::default() });
        assert!(rep.checks.is_empty());
        assert!(rep.all_passed());
    }

    #[test]
    fn perturbed_j_is_flagged() {
        let rep = verify(&VerifyConfig { samples: 50, seed: 42, j_perturbation: 1e-6 });
        let pj = rep.get("pj_anticommute").unwrap();
        assert!(!pj.passed, "{:e}", pj.max_residual);
        assert!(!rep.all_passed());
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = VerifyConfig { samples: 20, seed: 5, j_perturbation: 0.0 };
        let (a, b) = (verify(&cfg), verify(&cfg));
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert_eq!(x.max_residual.to_bits(), y.max_residual.to_bits());
        }
    }
}
