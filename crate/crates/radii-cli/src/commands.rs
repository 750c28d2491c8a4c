//! The subcommands, callable as library functions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use radii::certify::{
    check_glue, coexistence_count, prove_point, z0_error, BranchCertificate, CertMeta, CertifyError,
    CoexistenceReport, SegmentRecord,
};
use radii::continuation::{adaptive_step, tangent_at, AttemptOutcome, ContinuationError, ContinuationState};
use radii::contraction::{prove, ContractionError};
use radii::estimates::{q_star, AlphaTable, EstimateParams};
use radii::seqspace::z_at_zero;
use radii::CosinePoint;
use rayon::prelude::*;

use crate::certfile::{sha256_hex, CertFile, CertKind, ParamsJson, PointFile, SegmentJson, SCHEMA};
use crate::config::RunConfig;
use crate::{svg, CliError};

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io = |e| CliError::io(path, e);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn now_string() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

/// A starting point and, when the seed file gives one, a tangent to orient by.
#[derive(Debug, Clone)]
pub struct Seed {
    pub point: CosinePoint<f64>,
    pub tangent: Option<CosinePoint<f64>>,
    /// Bytes identifying the seed, hashed into the outputs.
    pub fingerprint: Vec<u8>,
}

/// `constant@D` or the path of a point file.
pub fn load_seed(cfg: &RunConfig) -> Result<Seed, CliError> {
    let seed = cfg.seed.trim();
    if let Some(d) = seed.strip_prefix("constant@") {
        let d: f64 = d
            .parse()
            .map_err(|_| CliError::Usage(format!("bad seed {seed:?}: expected constant@<d>")))?;
        if !(d > 0.0) || !d.is_finite() {
            return Err(CliError::Usage(format!("bad seed {seed:?}: d must be positive")));
        }
        return Ok(Seed {
            point: cfg.params().constant_point(d, cfg.m0),
            tangent: None,
            fingerprint: seed.as_bytes().to_vec(),
        });
    }
    let text = read_text(Path::new(seed)).map_err(|e| CliError::Usage(format!("bad seed file: {e}")))?;
    let pf = PointFile::from_json(&text)?;
    let bad = |e: CliError| CliError::Usage(format!("bad seed file: {e}"));
    let point = pf.point.point().map_err(bad)?;
    let tangent = pf.tangent.as_ref().map(|t| t.point()).transpose().map_err(bad)?;
    let m = point.m().max(cfg.m0);
    Ok(Seed {
        point: point.resize(m),
        tangent: tangent.map(|t| t.resize(m)),
        fingerprint: text.into_bytes(),
    })
}

fn input_hash(cfg: &RunConfig, seed: &Seed) -> String {
    let mut bytes = cfg.to_text().into_bytes();
    bytes.push(b'\n');
    bytes.extend_from_slice(&seed.fingerprint);
    sha256_hex(&bytes)
}

fn config_map(cfg: &RunConfig) -> BTreeMap<String, String> {
    cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn eps_r(rec: &SegmentRecord) -> f64 {
    z0_error(rec.r, rec.seg.space.q()).map(|e| e.hi()).unwrap_or(f64::INFINITY)
}

fn cert_file(kind: CertKind, cfg: &RunConfig, hash: String, records: &[SegmentRecord]) -> CertFile {
    let glue_ok = match kind {
        CertKind::Branch => records.windows(2).map(|w| check_glue(&w[0], &w[1])).collect(),
        CertKind::Point => Vec::new(),
    };
    CertFile {
        schema: SCHEMA,
        kind,
        created: now_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_map(cfg),
        input_hash: hash,
        params: ParamsJson::new(&cfg.params()),
        segments: records
            .iter()
            .enumerate()
            .map(|(i, r)| SegmentJson::new(i, r, eps_r(r)))
            .collect(),
        glue_ok,
        content_hash: String::new(),
    }
    .seal()
}

fn csv_header(cfg: &RunConfig, hash: &str) -> String {
    let mut s = String::new();
    for (k, v) in cfg.entries() {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let _ = writeln!(s, "# input_hash = {hash}");
    s
}

/// Sidecar path for the step log of a certificate.
pub fn log_path(out: &Path) -> PathBuf {
    out.with_extension("log.csv")
}

fn event_summary(events: &[radii::continuation::AttemptEvent]) -> String {
    events
        .iter()
        .filter_map(|e| match &e.outcome {
            AttemptOutcome::Verified { .. } => None,
            AttemptOutcome::ShrinkDs { .. } => Some("shrink-ds".to_string()),
            AttemptOutcome::GrowM { to, .. } => Some(format!("grow-m:{to}")),
        })
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone)]
pub struct ContinueSummary {
    pub segments: usize,
    pub d_final: f64,
    pub cert: PathBuf,
    pub log: PathBuf,
}

fn numerical(e: ContinuationError) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Continues from the seed until `stop-d` is passed or `max-steps` segments
/// are verified, then writes the certificate and the step log.  On a failed
/// step the verified prefix is still written and the error names the stage.
pub fn cmd_continue(cfg: &RunConfig, out: &Path) -> Result<ContinueSummary, CliError> {
    let seed = load_seed(cfg)?;
    let hash = input_hash(cfg, &seed);
    let ccfg = cfg.continuation();
    let mut state = match &seed.tangent {
        Some(t) => ContinuationState {
            tangent: tangent_at(&seed.point, Some(t), &ccfg).map_err(numerical)?,
            current: seed.point.clone(),
            ds: ccfg.ds0,
            m: seed.point.m(),
            step_index: 0,
            pending_m: None,
        },
        None => ContinuationState::start(seed.point.clone(), cfg.direction, &ccfg).map_err(numerical)?,
    };

    let mut log = csv_header(cfg, &hash);
    log.push_str("step,d,z0,ds,m,q,r,kappa_hi,wall_time,events\n");
    let mut records: Vec<SegmentRecord> = Vec::new();
    let start = Instant::now();
    let d_start = state.current.d;
    let mut failure = None;
    for _ in 0..cfg.max_steps {
        if let Some(stop) = cfg.stop_d.0 {
            let d = state.current.d;
            if d == stop || (d - stop).signum() != (d_start - stop).signum() {
                break;
            }
        }
        let step = adaptive_step(&state, &ccfg, |seg| prove(seg, &ccfg.proof));
        let res = match step {
            Ok(r) => r,
            Err(e) => {
                failure = Some(match e {
                    ContinuationError::StepBudgetExceeded { .. } | ContinuationError::ProjectionTooLarge { .. } => {
                        CliError::Verification(format!("proof stage, segment {}: {e}", records.len()))
                    }
                    other => CliError::Numerical(format!("continuation stage, segment {}: {other}", records.len())),
                });
                break;
            }
        };
        let rec = SegmentRecord::from_proof(res.segment.clone(), &res.outcome);
        let _ = writeln!(
            log,
            "{},{},{},{},{},{},{:e},{},{:.3},{}",
            records.len(),
            res.state.current.d,
            z_at_zero(&res.state.current),
            res.log.last().map(|e| e.ds).unwrap_or(state.ds),
            rec.seg.m,
            cfg.q,
            rec.r,
            rec.kappa_hi,
            start.elapsed().as_secs_f64(),
            event_summary(&res.log)
        );
        let smooth = rec.smooth_ok;
        records.push(rec);
        state = res.state;
        if !smooth {
            failure = Some(CliError::Verification(format!(
                "smoothness stage, segment {}",
                records.len() - 1
            )));
            break;
        }
    }

    let cert = cert_file(CertKind::Branch, cfg, hash, &records);
    write_atomic(out, cert.to_json().as_bytes())?;
    let log_out = log_path(out);
    write_atomic(&log_out, log.as_bytes())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(ContinueSummary {
            segments: records.len(),
            d_final: state.current.d,
            cert: out.to_path_buf(),
            log: log_out,
        }),
    }
}

/// Proves a ball around the seed at its fixed `d` and writes a one-record
/// certificate.
pub fn cmd_prove_point(cfg: &RunConfig, out: &Path) -> Result<SegmentRecord, CliError> {
    let seed = load_seed(cfg)?;
    let hash = input_hash(cfg, &seed);
    let rec = prove_point(&seed.point, &cfg.point()?).map_err(|e| match e {
        CertifyError::Proof(ContractionError::Model(_) | ContractionError::BadSegment(_)) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Verification(format!("proof stage: {other}")),
    })?;
    let cert = cert_file(CertKind::Point, cfg, hash, std::slice::from_ref(&rec));
    write_atomic(out, cert.to_json().as_bytes())?;
    Ok(rec)
}

/// Outcome of re-running every check of a certificate.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub kind: CertKind,
    pub records: Vec<SegmentRecord>,
    /// One line per failed check, naming segment and check.
    pub failures: Vec<String>,
    pub meta: CertMeta,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn load_cert(path: &Path) -> Result<CertFile, CliError> {
    CertFile::from_json(&read_text(path)?).map_err(|e| e.at(path))
}

/// Recomputes every rigorous check from the stored data; stored flags and
/// hashes are compared but never trusted.
pub fn verify_cert(cert: &CertFile) -> Result<VerifyReport, CliError> {
    let mut failures = Vec::new();
    if cert.compute_hash() != cert.content_hash {
        failures.push("certificate: content hash mismatch".to_string());
    }
    let params = cert.params.params()?;
    let segs = cert
        .segments
        .iter()
        .map(|s| Ok((s.segment(params)?, s.r.value()?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let opts = radii::contraction::ProofOptions::default();
    let checked: Vec<(SegmentRecord, Option<CertifyError>)> = segs
        .into_par_iter()
        .map(|(seg, r)| SegmentRecord::reverify(seg, r, &opts))
        .collect();
    let mut records = Vec::with_capacity(checked.len());
    for (i, (rec, err)) in checked.into_iter().enumerate() {
        match (cert.kind, err) {
            (_, None) => {}
            (CertKind::Point, Some(CertifyError::SmoothnessUnverified { .. })) => {}
            (_, Some(CertifyError::SmoothnessUnverified { lo, hi })) => {
                failures.push(format!("segment {i}: smoothness: left side in [{lo:e}, {hi:e}]"))
            }
            (_, Some(e)) => failures.push(format!("segment {i}: radii: {e}")),
        }
        records.push(rec);
    }
    if cert.kind == CertKind::Branch {
        if cert.glue_ok.len() != records.len().saturating_sub(1) {
            failures.push("certificate: glue list has the wrong length".into());
        }
        for i in 1..records.len() {
            if !check_glue(&records[i - 1], &records[i]) {
                failures.push(format!("junction {}-{i}: glue", i - 1));
            }
        }
    }
    Ok(VerifyReport {
        kind: cert.kind,
        records,
        failures,
        meta: CertMeta {
            params,
            created: cert.created.clone(),
            code_version: cert.code_version.clone(),
        },
    })
}

pub fn cmd_verify(path: &Path) -> Result<VerifyReport, CliError> {
    let cert = load_cert(path)?;
    let report = verify_cert(&cert).map_err(|e| e.at(path))?;
    if report.passed() {
        Ok(report)
    } else {
        Err(CliError::Verification(format!(
            "{}:\n  {}",
            path.display(),
            report.failures.join("\n  ")
        )))
    }
}

fn load_verified(paths: &[PathBuf], verify_first: bool) -> Result<Vec<(CertFile, Option<VerifyReport>)>, CliError> {
    paths
        .iter()
        .map(|p| {
            let cert = load_cert(p)?;
            if !verify_first {
                return Ok((cert, None));
            }
            let rep = verify_cert(&cert).map_err(|e| e.at(p))?;
            if !rep.passed() {
                return Err(CliError::Verification(format!(
                    "{}:\n  {}",
                    p.display(),
                    rep.failures.join("\n  ")
                )));
            }
            Ok((cert, Some(rep)))
        })
        .collect()
}

/// Writes the diagram CSV (one row per junction point) and its SVG plot.
pub fn cmd_diagram(paths: &[PathBuf], csv_out: &Path, svg_out: &Path, verify_first: bool) -> Result<usize, CliError> {
    let certs = load_verified(paths, verify_first)?;
    let hashes: Vec<String> = certs.iter().map(|(c, _)| c.content_hash.clone()).collect();
    let mut csv = String::new();
    for (p, h) in paths.iter().zip(&hashes) {
        let _ = writeln!(csv, "# input = {} sha256:{h}", p.display());
    }
    let _ = writeln!(csv, "# verified = {verify_first}");
    csv.push_str("branch_id,segment_id,d,z0,r,eps_r,m,q\n");
    let mut branches = Vec::new();
    let mut rows = 0;
    for (b, ((cert, _), path)) in certs.iter().zip(paths).enumerate() {
        let params = cert.params.params().map_err(|e| e.at(path))?;
        let mut pts = Vec::new();
        let n = cert.segments.len();
        for (i, s) in cert.segments.iter().enumerate() {
            let seg = s.segment(params).map_err(|e| e.at(path))?;
            let (r, eps) = (s.r.value().map_err(|e| e.at(path))?, s.eps_r.value().map_err(|e| e.at(path))?);
            let q = seg.space.q();
            let mut push = |id: usize, u: &CosinePoint<f64>| {
                let z = z_at_zero(u);
                let _ = writeln!(csv, "{b},{id},{},{z},{r:e},{eps:e},{},{q}", u.d, seg.m);
                pts.push((u.d, z, eps));
                rows += 1;
            };
            push(i, &seg.u0);
            if i + 1 == n {
                push(n, &seg.u1);
            }
        }
        branches.push(pts);
    }
    let comment = format!("inputs: {}", hashes.join(" "));
    write_atomic(csv_out, csv.as_bytes())?;
    write_atomic(svg_out, svg::render(&branches, &comment).as_bytes())?;
    Ok(rows)
}

/// Re-verifies the certificates, then counts solutions at `d_star`.
pub fn cmd_coexist(paths: &[PathBuf], d_star: f64) -> Result<CoexistenceReport, CliError> {
    let certs = load_verified(paths, true)?;
    let branches: Vec<BranchCertificate> = certs
        .into_iter()
        .filter_map(|(c, rep)| {
            let rep = rep.expect("verified");
            (c.kind == CertKind::Branch).then(|| BranchCertificate::assemble(rep.records, rep.meta))
        })
        .collect();
    coexistence_count(&branches, d_star).map_err(|e| match e {
        CertifyError::OverlappingWitnesses { report, pairs } => CliError::Verification(format!(
            "{} crossings found but witnesses {pairs:?} overlap in z(0)\n{}",
            report.count,
            format_report(&report)
        )),
        other => CliError::Verification(other.to_string()),
    })
}

pub fn format_report(rep: &CoexistenceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d* = {}: {} distinct solutions", rep.d_star, rep.count);
    let _ = writeln!(s, "branch,segments,z0_lo,z0_hi");
    for w in &rep.witnesses {
        let _ = writeln!(s, "{},{}..{},{},{}", w.cert, w.first, w.last, w.z0.lo(), w.z0.hi());
    }
    let _ = writeln!(s, "max eps_r = {:e}", rep.max_eps_r);
    s
}

/// The estimate table for `(q, K, M)`: `n, α_n, C_n + ε_n`.
pub fn cmd_estimates(cfg: &RunConfig, big_m: usize, out: &Path) -> Result<(), CliError> {
    let ep = EstimateParams {
        q: cfg.q,
        k: cfg.k_tail,
        big_m,
        k_sharp: cfg.k_sharp_factor * big_m,
        sharper_tail: cfg.sharper_tail.0,
    };
    let table = AlphaTable::new(&ep).map_err(|e| CliError::Usage(e.to_string()))?;
    let qs = q_star(big_m).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "# q = {}", cfg.q);
    let _ = writeln!(s, "# K = {}", cfg.k_tail);
    let _ = writeln!(s, "# K_sharp = {}", ep.k_sharp);
    let _ = writeln!(s, "# M = {big_m}");
    let _ = writeln!(s, "# q_star = {:.4} in [{}, {}]", qs.mid(), qs.lo(), qs.hi());
    let _ = writeln!(s, "# gamma_branch = {}", table.branch.label());
    s.push_str("n,alpha,sharp_const\n");
    for n in 0..=big_m {
        let sharp = table.cq.get(n).map(|c| c.hi().to_string()).unwrap_or_default();
        let _ = writeln!(s, "{n},{},{sharp}", table.alpha[n].hi());
    }
    write_atomic(out, s.as_bytes())
}
