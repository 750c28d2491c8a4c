//! On-disk formats.  Every real is stored as a hex-float string, with a
//! decimal shadow for people; only the hex form is ever read back.

use std::collections::BTreeMap;

use radii::certify::{RecordFlags, SegmentRecord};
use radii::contraction::{EstimateSettings, SegmentData};
use radii::{CosinePoint, ModelParams, SpaceParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::hexfloat;
use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Real {
    pub hex: String,
    pub dec: f64,
}

impl Real {
    pub fn new(x: f64) -> Self {
        Real {
            hex: hexfloat::format(x),
            dec: if x.is_finite() { x } else { 0.0 },
        }
    }

    pub fn value(&self) -> Result<f64, CliError> {
        hexfloat::parse(&self.hex).map_err(|e| CliError::corrupt(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVec {
    pub hex: Vec<String>,
    pub dec: Vec<f64>,
}

impl RealVec {
    pub fn new(v: &[f64]) -> Self {
        RealVec {
            hex: v.iter().map(|&x| hexfloat::format(x)).collect(),
            dec: v.to_vec(),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        self.hex
            .iter()
            .map(|s| hexfloat::parse(s).map_err(|e| CliError::corrupt(e.to_string())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub m: usize,
    pub d: Real,
    pub x: RealVec,
    pub y: RealVec,
    pub z: RealVec,
}

impl PointJson {
    pub fn new(p: &CosinePoint<f64>) -> Self {
        PointJson {
            m: p.m(),
            d: Real::new(p.d),
            x: RealVec::new(&p.x),
            y: RealVec::new(&p.y),
            z: RealVec::new(&p.z),
        }
    }

    pub fn point(&self) -> Result<CosinePoint<f64>, CliError> {
        let (x, y, z) = (self.x.values()?, self.y.values()?, self.z.values()?);
        if x.len() != self.m || y.len() != self.m || z.len() != self.m {
            return Err(CliError::corrupt(format!("point declares m = {} but stores other lengths", self.m)));
        }
        CosinePoint::new(self.d.value()?, x, y, z).map_err(|e| CliError::corrupt(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub a1: Real,
    pub a2: Real,
    pub b1: Real,
    pub b2: Real,
    pub r1: Real,
    pub r2: Real,
    pub beta: Real,
    pub eps: Real,
    #[serde(rename = "N")]
    pub big_n: Real,
}

impl ParamsJson {
    pub fn new(p: &ModelParams) -> Self {
        ParamsJson {
            a1: Real::new(p.a1),
            a2: Real::new(p.a2),
            b1: Real::new(p.b1),
            b2: Real::new(p.b2),
            r1: Real::new(p.r1),
            r2: Real::new(p.r2),
            beta: Real::new(p.beta),
            eps: Real::new(p.eps),
            big_n: Real::new(p.big_n),
        }
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams {
            a1: self.a1.value()?,
            a2: self.a2.value()?,
            b1: self.b1.value()?,
            b2: self.b2.value()?,
            r1: self.r1.value()?,
            r2: self.r2.value()?,
            beta: self.beta.value()?,
            eps: self.eps.value()?,
            big_n: self.big_n.value()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagsJson {
    pub j_injective: bool,
    pub radii_verified: bool,
    pub smooth_verified: bool,
}

impl From<RecordFlags> for FlagsJson {
    fn from(f: RecordFlags) -> Self {
        FlagsJson {
            j_injective: f.j_injective,
            radii_verified: f.radii_verified,
            smooth_verified: f.smooth_verified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentJson {
    pub id: usize,
    pub m: usize,
    pub q: Real,
    pub rho: Real,
    #[serde(rename = "K_tail")]
    pub k_tail: usize,
    #[serde(rename = "K_sharp_factor")]
    pub k_sharp_factor: usize,
    pub sharper_tail: Option<Real>,
    pub u0: PointJson,
    pub u1: PointJson,
    pub t0: PointJson,
    pub t1: PointJson,
    pub r: Real,
    pub kappa_hi: Real,
    pub eps_r: Real,
    pub smooth_ok: bool,
    pub flags: FlagsJson,
}

impl SegmentJson {
    pub fn new(id: usize, rec: &SegmentRecord, eps_r: f64) -> Self {
        let s = &rec.seg;
        SegmentJson {
            id,
            m: s.m,
            q: Real::new(s.space.q()),
            rho: Real::new(s.space.rho()),
            k_tail: s.ep.k,
            k_sharp_factor: s.ep.k_sharp / s.ep.big_m,
            sharper_tail: s.ep.sharper_tail.map(Real::new),
            u0: PointJson::new(&s.u0),
            u1: PointJson::new(&s.u1),
            t0: PointJson::new(&s.t0),
            t1: PointJson::new(&s.t1),
            r: Real::new(rec.r),
            kappa_hi: Real::new(rec.kappa_hi),
            eps_r: Real::new(eps_r),
            smooth_ok: rec.smooth_ok,
            flags: rec.flags.into(),
        }
    }

    /// The stored segment, rebuilt for re-verification.
    pub fn segment(&self, params: ModelParams) -> Result<SegmentData, CliError> {
        let space = SpaceParams::new(self.q.value()?, self.rho.value()?)
            .map_err(|e| CliError::corrupt(format!("segment {}: {e}", self.id)))?;
        let est = EstimateSettings {
            k_tail: self.k_tail,
            k_sharp_factor: self.k_sharp_factor,
            sharper_tail: self.sharper_tail.as_ref().map(Real::value).transpose()?,
        };
        let seg = SegmentData::new(
            self.u0.point()?,
            self.u1.point()?,
            self.t0.point()?,
            self.t1.point()?,
            space,
            params,
            est,
        )
        .map_err(|e| CliError::corrupt(format!("segment {}: {e}", self.id)))?;
        if seg.m != self.m {
            return Err(CliError::corrupt(format!("segment {}: m mismatch", self.id)));
        }
        Ok(seg)
    }
}

/// What a certificate certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertKind {
    /// Glued tubes along a branch.
    Branch,
    /// Isolated balls at fixed `d`.
    Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertFile {
    pub schema: u32,
    pub kind: CertKind,
    pub created: String,
    pub code_version: String,
    pub config: BTreeMap<String, String>,
    pub input_hash: String,
    pub params: ParamsJson,
    pub segments: Vec<SegmentJson>,
    pub glue_ok: Vec<bool>,
    pub content_hash: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl CertFile {
    /// SHA-256 of the serialization with an empty `content_hash`.
    pub fn compute_hash(&self) -> String {
        let mut c = self.clone();
        c.content_hash.clear();
        sha256_hex(&serde_json::to_vec(&c).expect("plain data serializes"))
    }

    pub fn seal(mut self) -> Self {
        self.content_hash = self.compute_hash();
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: CertFile = serde_json::from_str(text).map_err(|e| CliError::corrupt(e.to_string()))?;
        if c.schema != SCHEMA {
            return Err(CliError::corrupt(format!("unsupported schema {}", c.schema)));
        }
        Ok(c)
    }
}

/// A seed point, optionally with a tangent fixing the direction of travel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    pub schema: u32,
    pub point: PointJson,
    #[serde(default)]
    pub tangent: Option<PointJson>,
    #[serde(default)]
    pub note: String,
}

impl PointFile {
    pub fn new(p: &CosinePoint<f64>, t: Option<&CosinePoint<f64>>, note: &str) -> Self {
        PointFile {
            schema: SCHEMA,
            point: PointJson::new(p),
            tangent: t.map(PointJson::new),
            note: note.to_string(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let p: PointFile = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad seed file: {e}")))?;
        if p.schema != SCHEMA {
            return Err(CliError::Usage(format!("bad seed file: unsupported schema {}", p.schema)));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}
