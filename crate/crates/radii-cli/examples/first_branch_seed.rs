//! Regenerates `tests/fixtures/first_branch_seed.json`: a point on the branch
//! that bifurcates from the constant state through mode 1, at d just below
//! 0.02, with its tangent pointing towards smaller d.
//!
//! Run with `cargo run -p radii-cli --example first_branch_seed`.

use nalgebra::Matrix3;
use radii::continuation::{correct, predict, tangent_at, ContinuationConfig, ContinuationState};
use radii::{CosinePoint, Model, ModelParams};
use radii_cli::certfile::PointFile;

const M: usize = 40;
const TARGET_D: f64 = 0.02;

fn mode1_block(p: &ModelParams, d: f64) -> Matrix3<f64> {
    let model = Model::<f64>::new(p).expect("valid parameters");
    let df = model.df_matrix(&p.constant_point(d, M));
    Matrix3::from_fn(|i, j| df[(3 + i, 4 + j)])
}

fn main() {
    let cfg = ContinuationConfig::default();
    let p = cfg.params;

    let (mut lo, mut hi) = (0.02, 0.03);
    let sign_lo = mode1_block(&p, lo).determinant().signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mode1_block(&p, mid).determinant().signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d_bif = 0.5 * (lo + hi);
    let svd = mode1_block(&p, d_bif).svd(false, true);
    let kernel = svd.v_t.expect("V^T").row(svd.singular_values.imin()).transpose();
    eprintln!("mode-1 bifurcation at d = {d_bif}");

    let mut guess = p.constant_point(d_bif - 1e-3, M);
    for c in 0..3 {
        guess.comp_mut(c).coeffs_mut()[1] = 0.2 * kernel[c];
    }
    let mut e_d = CosinePoint::zeros(M);
    e_d.d = 1.0;
    let start = correct(&guess, &e_d, &cfg).expect("Newton converges near the bifurcation");
    assert!(start.x[1].abs() > 1e-2, "landed on the constant branch");

    let mut st = ContinuationState::start(start, -1.0, &cfg).expect("regular start");
    st.ds = 2e-3;
    while st.current.d > TARGET_D {
        let u = correct(&predict(&st), &st.tangent, &cfg).expect("corrector");
        st.tangent = tangent_at(&u, Some(&st.tangent), &cfg).expect("regular point");
        st.current = u;
    }
    eprintln!("seed at d = {}, x_1 = {}", st.current.d, st.current.x[1]);

    let out = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/first_branch_seed.json");
    let pf = PointFile::new(
        &st.current,
        Some(&st.tangent),
        "first branch bifurcating from the constant state (mode 1), d just below 0.02",
    );
    std::fs::write(out, pf.to_json()).expect("write fixture");
    eprintln!("wrote {out}");
}
