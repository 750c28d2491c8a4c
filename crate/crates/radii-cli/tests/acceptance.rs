//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use radii::certify::{
    check_smooth, coexistence_count, prove_point, z0_error, BranchCertificate, CertMeta, CertifyError,
    PointConfig, RecordFlags, SegmentRecord,
};
use radii::continuation::{adaptive_step, tangent_at, AttemptOutcome, ContinuationConfig, ContinuationState};
use radii::contraction::{
    build_j, compute_y, prove, ContractionError, EmptyReport, EstimateSettings, ProofOutcome, SegmentData,
};
use radii::estimates::{alpha, alpha_tail_sharper, psi_oracle, q_star, EstimateParams};
use radii::interval::Interval;
use radii::seqspace::conv;
use radii::{CosinePoint, Model, ModelParams, SpaceParams};
use radii_cli::certfile::{CertFile, PointFile, Real};
use radii_cli::commands::{cmd_continue, load_cert, verify_cert};
use radii_cli::config::{OptF64, RunConfig};
use radii_cli::hexfloat;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/first_branch_seed.json");

const EQUILIBRIUM_WIDTH: f64 = 1e-12;
const CONV_TOL: f64 = 1e-13;
const COSINE_TOL: f64 = 1e-10;
const DERIV_REL_TOL: f64 = 1e-5;
const TAYLOR_TOL: f64 = 1e-12;
const Q_STAR_100: f64 = 1.4730;
const Q_STAR_TOL: f64 = 5e-4;
const Q_STAR_CAP: f64 = 1.48;
const TRIVIAL_R_RANGE: (f64, f64) = (1e-10, 1e-3);
const POINT_R: f64 = 1e-8;
const EPS_R_CAP: f64 = 1e-4;
const BIG_M: usize = 199;
const HOMOGENEOUS_M: usize = 100;

type Check = fn() -> Result<String, String>;
type Edit = Box<dyn Fn(&mut CertFile)>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    inf(&diff) / inf(want).max(1.0)
}

fn random_point(rng: &mut StdRng, m: usize) -> CosinePoint<f64> {
    let mut comp = |scale: f64| -> Vec<f64> {
        (0..m).map(|n| scale * rng.gen_range(-1.0..1.0) / (1.0 + (n * n) as f64)).collect()
    };
    let (x, y, z) = (comp(2.0), comp(0.5), comp(0.5));
    CosinePoint::new(rng.gen_range(0.005..0.05), x, y, z).unwrap()
}

fn equilibrium() -> Result<String, String> {
    let p = ModelParams::default();
    let model = Model::<Interval>::new(&p).map_err(|e| e.to_string())?;
    let mut widest = 0.0f64;
    for d in [0.004, 0.006, 0.02, 0.05] {
        let u = p.constant_point(d, 51).to_interval();
        for n in 0..=50 {
            for v in model.f_n(&u, n).as_array() {
                ensure(v.contains_zero() && v.width() < EQUILIBRIUM_WIDTH, || format!("d = {d}, n = {n}: {v}"))?;
                widest = widest.max(v.width());
            }
        }
    }
    Ok(format!("widest residual enclosure {widest:e}"))
}

fn estimates() -> Result<String, String> {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for q in [1.2, 1.5, 1.9, 2.0, 3.0] {
        let ep = EstimateParams::new(q, 10_000, BIG_M).map_err(|e| e.to_string())?;
        for n in [0, 1, 5, BIG_M, 2 * BIG_M, 10 * BIG_M] {
            let psi = psi_oracle(n, q, 1_000_000);
            let a = alpha(n, &ep).map_err(|e| e.to_string())?;
            ensure(psi <= a.lo(), || format!("q = {q}, n = {n}: {psi} > {}", a.lo()))?;
            worst = worst.min(a.lo() - psi);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("smallest margin {worst:e}"))
}

fn q_star_checks() -> Result<String, String> {
    let q100 = q_star(100).map_err(|e| e.to_string())?;
    ensure(
        q100.lo() - Q_STAR_TOL <= Q_STAR_100 && Q_STAR_100 <= q100.hi() + Q_STAR_TOL,
        || format!("q*(100) = {q100}"),
    )?;
    let mut prev = 1.0;
    for m in [6, 20, 100, 500, 10_000] {
        let q = q_star(m).map_err(|e| e.to_string())?;
        ensure(q.lo() >= prev, || format!("q*({m}) = {q} below {prev}"))?;
        prev = q.lo();
    }
    let last = q_star(10_000).map_err(|e| e.to_string())?;
    ensure(last.hi() < Q_STAR_CAP, || format!("q*(10000) = {last}"))?;
    Ok(format!("q*(100) = {:.5}, q*(10000) = {:.5}", q100.mid(), last.mid()))
}

fn convolution() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=16);
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for n in 0..2 * m {
            let mut s = 0.0;
            for k in -(m as i64 - 1)..m as i64 {
                let j = n as i64 - k;
                if j.abs() < m as i64 {
                    s += a[k.unsigned_abs() as usize] * b[j.unsigned_abs() as usize];
                }
            }
            let err = (conv(&a, &b, n) - s / 2.0).abs();
            ensure(err < CONV_TOL, || format!("m = {m}, n = {n}: error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    let eval = |c: &[f64], xi: f64| {
        c[0] / 2.0 + c.iter().enumerate().skip(1).map(|(k, v)| v * (std::f64::consts::PI * k as f64 * xi).cos()).sum::<f64>()
    };
    let mut worst_id = 0.0f64;
    for _ in 0..100 {
        let m = rng.gen_range(1..=16);
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let prod: Vec<f64> = (0..2 * m - 1).map(|n| 2.0 * conv(&a, &b, n)).collect();
        let xi: f64 = rng.gen_range(0.0..1.0);
        let err = (eval(&a, xi) * eval(&b, xi) - eval(&prod, xi) / 2.0).abs();
        ensure(err < COSINE_TOL, || format!("ξ = {xi}: error {err:e}"))?;
        worst_id = worst_id.max(err);
    }
    Ok(format!("max conv error {worst:e}, max identity error {worst_id:e}"))
}

fn derivatives() -> Result<String, String> {
    let p = ModelParams::default();
    let model = Model::<f64>::new(&p).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(202);
    let (mut w1, mut w2, mut w3) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let m = rng.gen_range(2..=7);
        let u = random_point(&mut rng, m);
        let jac = model.df_matrix(&u);
        let base = u.to_flat();
        let h = 1e-6;
        for col in 0..base.len() {
            let (mut plus, mut minus) = (base.clone(), base.clone());
            plus[col] += h;
            minus[col] -= h;
            let fp = model.f_flat(&CosinePoint::from_flat(&plus).unwrap());
            let fm = model.f_flat(&CosinePoint::from_flat(&minus).unwrap());
            let fd: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            let exact: Vec<f64> = (0..fd.len()).map(|r| jac[(r, col)]).collect();
            let e = rel_err(&exact, &fd);
            ensure(e < DERIV_REL_TOL, || format!("Df column {col}: {e:e}"))?;
            w1 = w1.max(e);
        }

        let (v, w) = (random_point(&mut rng, m), random_point(&mut rng, m));
        let h = 1e-4;
        let f = |a: &CosinePoint<f64>| model.f_flat(a);
        let (f0, f1, f2, f3) = (f(&u), f(&u.add_scaled(&v, h)), f(&u.add_scaled(&w, h)), f(&u.add_scaled(&v, h).add_scaled(&w, h)));
        let sd: Vec<f64> = (0..f0.len()).map(|i| (f3[i] - f1[i] - f2[i] + f0[i]) / (h * h)).collect();
        let exact: Vec<f64> = (0..m).flat_map(|n| model.d2f_apply(&u, &v, &w, n).as_array()).collect();
        let e = rel_err(&exact, &sd);
        ensure(e < DERIV_REL_TOL, || format!("D2f: {e:e}"))?;
        w2 = w2.max(e);

        let s: f64 = rng.gen_range(-1.0..1.0);
        let moved = u.add_scaled(&v, s);
        for n in 0..2 * m {
            let lhs = model.f_n(&moved, n).as_array();
            let (a, b, c) = (model.f_n(&u, n).as_array(), model.df_apply(&u, &v, n).as_array(), model.d2f_apply(&u, &v, &v, n).as_array());
            for k in 0..3 {
                let scale = (a[k].abs() + b[k].abs() + c[k].abs()).max(1.0);
                let e = (lhs[k] - (a[k] + s * b[k] + 0.5 * s * s * c[k])).abs() / scale;
                ensure(e < TAYLOR_TOL, || format!("Taylor n = {n}: {e:e}"))?;
                w3 = w3.max(e);
            }
        }
    }
    Ok(format!("Df {w1:.1e}, D2f {w2:.1e}, Taylor {w3:.1e}"))
}

fn trivial_branch() -> Result<String, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let out = dir.path().join("trivial.json");
    let cfg = RunConfig {
        seed: "constant@0.05".into(),
        q: 2.0,
        m0: 25,
        rho: 10.0,
        stop_d: OptF64(Some(0.035)),
        max_steps: 10_000,
        ..RunConfig::default()
    };
    let s = cmd_continue(&cfg, &out).map_err(|e| e.to_string())?;
    ensure(s.d_final <= 0.035, || format!("stopped at d = {}", s.d_final))?;
    let rep = verify_cert(&load_cert(&out).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(rep.passed(), || rep.failures.join("; "))?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for rec in &rep.records {
        check_smooth(rec).map_err(|e| e.to_string())?;
        lo = lo.min(rec.r);
        hi = hi.max(rec.r);
    }
    ensure(lo >= TRIVIAL_R_RANGE.0 && hi <= TRIVIAL_R_RANGE.1, || format!("r in [{lo:e}, {hi:e}]"))?;
    Ok(format!("{} segments to d = {:.5}, r in [{lo:.2e}, {hi:.2e}]", s.segments, s.d_final))
}

fn fixture_state(cfg: &ContinuationConfig) -> Result<ContinuationState, String> {
    let text = std::fs::read_to_string(FIXTURE).map_err(|e| e.to_string())?;
    let pf = PointFile::from_json(&text).map_err(|e| e.to_string())?;
    let u = pf.point.point().map_err(|e| e.to_string())?;
    let t = pf.tangent.ok_or("fixture has no tangent")?.point().map_err(|e| e.to_string())?;
    Ok(ContinuationState {
        tangent: tangent_at(&u, Some(&t), cfg).map_err(|e| e.to_string())?,
        m: u.m(),
        current: u,
        ds: cfg.ds0,
        step_index: 0,
        pending_m: None,
    })
}

fn nontrivial_step() -> Result<(SegmentRecord, String), String> {
    let cfg = ContinuationConfig::default();
    let state = fixture_state(&cfg)?;
    let res = adaptive_step(&state, &cfg, |seg| prove(seg, &cfg.proof)).map_err(|e| e.to_string())?;
    let rec = SegmentRecord::from_proof(res.segment.clone(), &res.outcome);
    ensure(rec.kappa_hi < 1.0, || format!("κ ≤ {}", rec.kappa_hi))?;
    let smooth = check_smooth(&rec).map_err(|e| e.to_string())?;
    let detail = format!(
        "d {:.6} → {:.6}, m = {}, r = {:.2e}, κ ≤ {:.4}, smoothness side ≤ {:.2e}",
        rec.seg.u0.d, rec.seg.u1.d, rec.seg.m, rec.r, rec.kappa_hi, smooth.hi()
    );
    Ok((rec, detail))
}

fn nontrivial() -> Result<String, String> {
    nontrivial_step().map(|(_, d)| d)
}

fn point_mode() -> Result<String, String> {
    let u = ModelParams::default().constant_point(0.02, 85);
    let cfg = PointConfig {
        space: SpaceParams::new(2.0, 10.0).map_err(|e| e.to_string())?,
        params: ModelParams::default(),
        estimates: EstimateSettings::default(),
        target_r: Some(POINT_R),
    };
    let rec = prove_point(&u, &cfg).map_err(|e| e.to_string())?;
    ensure(rec.r <= POINT_R, || format!("r = {:e}", rec.r))?;
    Ok(format!("m = 85, r = {:e}, κ ≤ {:.4}", rec.r, rec.kappa_hi))
}

fn forced_record(u0: CosinePoint<f64>, u1: CosinePoint<f64>, t: CosinePoint<f64>) -> SegmentRecord {
    let seg = SegmentData::new(
        u0,
        u1,
        t.clone(),
        t,
        SpaceParams::new(2.0, 10.0).unwrap(),
        ModelParams::default(),
        EstimateSettings::default(),
    )
    .unwrap();
    SegmentRecord {
        seg,
        r: 1e-6,
        kappa_hi: 0.5,
        smooth_ok: true,
        flags: RecordFlags {
            j_injective: true,
            radii_verified: true,
            smooth_verified: true,
        },
    }
}

fn meta() -> CertMeta {
    CertMeta {
        params: ModelParams::default(),
        created: String::new(),
        code_version: String::new(),
    }
}

/// Down from 0.03 to 0.015 and back on another `z(0)` level.
fn fold_cert() -> BranchCertificate {
    let pt = |d: f64, dz: f64| {
        let mut u = ModelParams::default().constant_point(d, 8);
        u.z.coeffs_mut()[1] = dz;
        u
    };
    let pts = [pt(0.03, 0.0), pt(0.02, 0.0), pt(0.015, 0.05), pt(0.02, 0.1), pt(0.03, 0.1)];
    let mut t = CosinePoint::zeros(8);
    t.d = 1.0;
    let recs = pts.windows(2).map(|w| forced_record(w[0].clone(), w[1].clone(), t.clone())).collect();
    BranchCertificate::assemble(recs, meta())
}

fn coexistence() -> Result<String, String> {
    let fold = [fold_cert()];
    for (d_star, want) in [(0.025, 2), (0.01, 0), (0.05, 0)] {
        let rep = coexistence_count(&fold, d_star).map_err(|e| e.to_string())?;
        ensure(rep.count == want, || format!("d* = {d_star}: {} crossings", rep.count))?;
    }
    match coexistence_count(&fold, 0.015) {
        Err(CertifyError::AmbiguousCrossing { .. }) => {}
        other => return Err(format!("tip on d*: {other:?}")),
    }
    match coexistence_count(&fold, 0.02) {
        Err(CertifyError::OverlappingWitnesses { report, .. })
            if report.witnesses[0].last == 1 && report.witnesses[1].first == 2 => {}
        other => return Err(format!("junction on d*: {other:?}")),
    }
    for q in [1.2, 1.5, 2.0, 3.0] {
        let e = z0_error(0.999e-5, q).map_err(|e| e.to_string())?.hi();
        ensure(e < EPS_R_CAP, || format!("ε_r = {e:e} at q = {q}"))?;
    }

    // Real proofs: the nontrivial fixture segment and the homogeneous state
    // over the same d range.
    let (rec, _) = nontrivial_step()?;
    let (d0, d1) = rec.d_range();
    let m = HOMOGENEOUS_M;
    let mut t = CosinePoint::zeros(m);
    t.d = (d1 - d0).signum();
    let p = ModelParams::default();
    let trivial = SegmentData::new(
        p.constant_point(d0, m),
        p.constant_point(d1, m),
        t.clone(),
        t,
        rec.seg.space,
        p,
        EstimateSettings::default(),
    )
    .map_err(|e| e.to_string())?;
    let out = prove(&trivial, &Default::default()).map_err(|e| format!("homogeneous segment: {e}"))?;
    let certs = [
        BranchCertificate::assemble(vec![SegmentRecord::from_proof(trivial, &out)], meta()),
        BranchCertificate::assemble(vec![rec], meta()),
    ];
    let d_star = 0.5 * (d0 + d1);
    let rep = coexistence_count(&certs, d_star).map_err(|e| e.to_string())?;
    ensure(rep.count >= 2, || format!("{} witnesses at d* = {d_star}", rep.count))?;
    Ok(format!(
        "synthetic fold counts exact; {} proved witnesses at d* = {d_star:.6}, max ε_r = {:.1e}; d* = 0.006 not reached by the fixture",
        rep.count, rep.max_eps_r
    ))
}

fn sharper_bounds() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(303);
    for _ in 0..100 {
        let m = rng.gen_range(4..=8);
        let d = rng.gen_range(0.02..0.06);
        let mut noisy = |d: f64| {
            let mut u = ModelParams::default().constant_point(d, m);
            for c in 0..3 {
                for (n, v) in u.comp_mut(c).coeffs_mut().iter_mut().enumerate() {
                    *v += 0.05 * rng.gen_range(-1.0..1.0) / (1.0 + (n * n) as f64);
                }
            }
            u
        };
        let (u0, mut u1) = (noisy(d), noisy(d - 1e-4));
        u1.d = d - 1e-4;
        let mut t = CosinePoint::zeros(m);
        t.d = -1.0;
        let seg = SegmentData::new(u0, u1, t.clone(), t, SpaceParams::new(2.0, 10.0).unwrap(), ModelParams::default(), EstimateSettings::default())
            .map_err(|e| e.to_string())?;
        let y = compute_y(&seg, &build_j(&seg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for (s, p) in y.sharp.iter().zip(&y.plain) {
            ensure(s.hi() <= p.hi() * (1.0 + 1e-12), || format!("{s} > {p}"))?;
        }
    }
    let mut detail = Vec::new();
    for q in [1.8, 1.9] {
        let ep = EstimateParams::new(q, 10_000, BIG_M).map_err(|e| e.to_string())?;
        let plain = alpha(BIG_M, &ep).map_err(|e| e.to_string())?;
        let sharp = alpha_tail_sharper(&ep, 0.1, 200_000).map_err(|e| e.to_string())?;
        ensure(sharp.hi() <= plain.hi(), || format!("q = {q}: {sharp} > {plain}"))?;
        detail.push(format!("q = {q}: {:.4} vs {:.4}", sharp.hi(), plain.hi()));
    }
    Ok(format!("100 defect bounds dominated; tail {}", detail.join(", ")))
}

fn adaptive_loop() -> Result<String, String> {
    let cfg = ContinuationConfig::default();
    let state = ContinuationState::start(ModelParams::default().constant_point(0.05, 60), -1.0, &cfg)
        .map_err(|e| e.to_string())?;
    let mut calls = 0;
    let empty = |j: usize, seg: &SegmentData| {
        ContractionError::NoRadius(EmptyReport {
            empty: vec![j],
            disjoint: vec![],
            m: seg.m,
            big_m: seg.big_m(),
        })
    };
    let res = adaptive_step(&state, &cfg, |seg: &SegmentData| -> Result<ProofOutcome, ContractionError> {
        calls += 1;
        match calls {
            1 => Err(empty(1 + 3, seg)),
            2 => Err(empty(1 + 3 * seg.big_m() + 2, seg)),
            _ => prove(seg, &cfg.proof),
        }
    })
    .map_err(|e| e.to_string())?;
    let log = &res.log;
    ensure(log.len() == 3, || format!("{} attempts", log.len()))?;
    ensure(
        matches!(log[0].outcome, AttemptOutcome::ShrinkDs { .. })
            && log[1].m == log[0].m
            && (log[1].ds - log[0].ds * cfg.ds_down_factor).abs() <= 1e-18,
        || format!("small-n failure gave {:?}", log[0].outcome),
    )?;
    ensure(
        matches!(log[1].outcome, AttemptOutcome::GrowM { .. }) && log[2].m > log[1].m && log[2].ds == log[1].ds,
        || format!("tail failure gave {:?}", log[1].outcome),
    )?;
    ensure(matches!(log[2].outcome, AttemptOutcome::Verified { .. }), || format!("{:?}", log[2].outcome))?;
    Ok(format!("ds {:.2e} → {:.2e}, m {} → {}", log[0].ds, log[1].ds, log[1].m, log[2].m))
}

fn tamper() -> Result<String, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let out = dir.path().join("c.json");
    let cfg = RunConfig {
        m0: 60,
        ds0: 5e-4,
        max_steps: 2,
        ..RunConfig::default()
    };
    cmd_continue(&cfg, &out).map_err(|e| e.to_string())?;
    let good = load_cert(&out).map_err(|e| e.to_string())?;
    ensure(verify_cert(&good).map_err(|e| e.to_string())?.passed(), || "clean certificate fails".into())?;

    let flip = |r: &mut String, bit: u32| {
        let v = hexfloat::parse(r).unwrap();
        *r = hexfloat::format(f64::from_bits(v.to_bits() ^ (1u64 << bit)));
    };
    let mut tried = 0;
    let mut rng = StdRng::seed_from_u64(404);
    let caught = |c: &CertFile| verify_cert(c).map(|r| !r.passed()).unwrap_or(true);
    for seg in 0..good.segments.len() {
        for bit in [0u32, 17, 40, 51, 52, 62, 63] {
            let mut edits: Vec<Edit> = vec![
                Box::new(move |c| flip(&mut c.segments[seg].r.hex, bit)),
                Box::new(move |c| flip(&mut c.segments[seg].u0.d.hex, bit)),
                Box::new(move |c| flip(&mut c.segments[seg].u1.d.hex, bit)),
                Box::new(move |c| flip(&mut c.segments[seg].t0.d.hex, bit)),
                Box::new(move |c| flip(&mut c.segments[seg].t1.d.hex, bit)),
            ];
            let k = rng.gen_range(0..good.segments[seg].m);
            edits.push(Box::new(move |c| flip(&mut c.segments[seg].u0.x.hex[k], bit)));
            edits.push(Box::new(move |c| flip(&mut c.segments[seg].t1.z.hex[k], bit)));
            for edit in &edits {
                let mut c = good.clone();
                edit(&mut c);
                tried += 1;
                ensure(caught(&c), || format!("segment {seg}, bit {bit} not caught"))?;
            }
        }
    }
    let mut forged = good.clone();
    forged.segments[0].r = Real::new(0.5);
    let forged = forged.seal();
    ensure(caught(&forged), || "forged hash with inflated r passes".into())?;
    Ok(format!("{tried} single-bit edits and one resealed forgery rejected"))
}

fn main() -> ExitCode {
    let checks: [(usize, &str, Check); 12] = [
        (1, "exact equilibrium", equilibrium),
        (2, "estimate soundness", estimates),
        (3, "q* enclosure", q_star_checks),
        (4, "convolution oracle", convolution),
        (5, "derivative oracles", derivatives),
        (6, "homogeneous branch tubes", trivial_branch),
        (7, "nontrivial segment", nontrivial),
        (8, "point proof", point_mode),
        (9, "coexistence counting", coexistence),
        (10, "sharper bounds", sharper_bounds),
        (11, "adaptive loop", adaptive_loop),
        (12, "tamper detection", tamper),
    ];
    let mut failed = 0;
    for (n, name, check) in checks {
        let start = Instant::now();
        let res = check();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {n:>2} PASS {name} ({secs:.1} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL {name} ({secs:.1} s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
