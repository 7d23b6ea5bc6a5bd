//! Experiment state packed into a URL-safe string.
//!
//! Layout (little-endian), then base64url without padding:
//!
//! ```text
//! u8 version = 1
//! u8 family kind         index into FamilyKind::ALL
//! f64 a, f64 b
//! u8 free flag (0 | 1)   followed by f64 when 1
//! u8 target tag          0: center, u32 k   1: vertex, u8 i
//! u8 derived kind        index into DerivedKind::ALL
//! u32 samples
//! u8 style mode          index into StyleMode::ALL
//! u64 palette seed
//! f64 animation speed
//! ```

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::centers::DerivedKind;
use crate::error::{Error, Result};
use crate::family::{make_family, FamilyKind, FamilySpec};
use crate::locus::{LocusRequest, LocusTarget, DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::render::{Style, StyleMode};

pub const SCHEMA_VERSION: u8 = 1;
pub const MAX_SAMPLES: usize = 100_000;
pub const MAX_BLOB_LEN: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentState {
    pub schema_version: u8,
    pub family: FamilyKind,
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<f64>,
    pub target: LocusTarget,
    pub derived: DerivedKind,
    pub samples: usize,
    pub style: StyleMode,
    pub palette_seed: u64,
    /// Animation speed in family periods per second.
    pub speed: f64,
}

impl Default for ExperimentState {
    fn default() -> Self {
        ExperimentState {
            schema_version: SCHEMA_VERSION,
            family: FamilyKind::Confocal,
            a: 2.0,
            b: 1.0,
            free: None,
            target: LocusTarget::Center(1),
            derived: DerivedKind::Reference,
            samples: DEFAULT_SAMPLES,
            style: StyleMode::Wireframe,
            palette_seed: 1,
            speed: 1.0,
        }
    }
}

impl ExperimentState {
    pub fn family_spec(&self) -> Result<FamilySpec> {
        make_family(self.family, self.a, self.b, self.free)
    }

    pub fn locus_request(&self) -> Result<LocusRequest> {
        Ok(LocusRequest::new(self.family_spec()?, self.target).with_derived(self.derived).with_samples(self.samples))
    }

    pub fn style(&self) -> Style {
        Style::new(self.style).with_seed(self.palette_seed)
    }

    /// Every field invariant, reported as `OutOfRange`.
    pub fn validate(&self) -> Result<()> {
        let out = |msg: String| Err(Error::OutOfRange(msg));
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::UnsupportedVersion(self.schema_version));
        }
        let takes_free = matches!(self.family, FamilyKind::Circumcircle | FamilyKind::Generic);
        if self.free.is_some() && !takes_free {
            return out(format!("{} family takes no free parameter", self.family.name()));
        }
        if !(MIN_SAMPLES..=MAX_SAMPLES).contains(&self.samples) {
            return out(format!("samples {} not in {MIN_SAMPLES}..={MAX_SAMPLES}", self.samples));
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return out(format!("speed must be finite and positive, got {}", self.speed));
        }
        self.locus_request().and_then(|r| r.validate()).map_err(|e| Error::OutOfRange(e.to_string()))
    }
}

fn index_of<T: PartialEq>(all: &[T], v: &T) -> u8 {
    all.iter().position(|x| x == v).expect("enum value listed in ALL") as u8
}

/// Canonical encoding; equal states give equal strings.
pub fn encode(s: &ExperimentState) -> String {
    let mut buf = Vec::with_capacity(64);
    buf.push(s.schema_version);
    buf.push(index_of(&FamilyKind::ALL, &s.family));
    buf.extend(s.a.to_le_bytes());
    buf.extend(s.b.to_le_bytes());
    match s.free {
        Some(f) => {
            buf.push(1);
            buf.extend(f.to_le_bytes());
        }
        None => buf.push(0),
    }
    match s.target {
        LocusTarget::Center(k) => {
            buf.push(0);
            buf.extend(k.to_le_bytes());
        }
        LocusTarget::Vertex(i) => {
            buf.push(1);
            buf.push(i);
        }
    }
    buf.push(index_of(&DerivedKind::ALL, &s.derived));
    buf.extend((s.samples.min(u32::MAX as usize) as u32).to_le_bytes());
    buf.push(index_of(&StyleMode::ALL, &s.style));
    buf.extend(s.palette_seed.to_le_bytes());
    buf.extend(s.speed.to_le_bytes());
    URL_SAFE_NO_PAD.encode(buf)
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.bytes.len() < N {
            return Err(Error::CorruptBlob("truncated".into()));
        }
        let (head, rest) = self.bytes.split_at(N);
        self.bytes = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn pick<T: Copy>(&mut self, all: &[T], what: &str) -> Result<T> {
        let i = self.u8()?;
        all.get(i as usize).copied().ok_or_else(|| Error::CorruptBlob(format!("unknown {what} {i}")))
    }
}

/// Inverse of [`encode`]. Rejects anything that is not a complete, valid
/// version-1 state.
pub fn decode(blob: &str) -> Result<ExperimentState> {
    if blob.is_empty() || blob.len() > MAX_BLOB_LEN {
        return Err(Error::CorruptBlob(format!("blob length {}", blob.len())));
    }
    let bytes = URL_SAFE_NO_PAD.decode(blob).map_err(|e| Error::CorruptBlob(e.to_string()))?;
    let mut r = Reader { bytes: &bytes };
    let version = r.u8()?;
    if version != SCHEMA_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let family = r.pick(&FamilyKind::ALL, "family kind")?;
    let a = r.f64()?;
    let b = r.f64()?;
    let free = match r.u8()? {
        0 => None,
        1 => Some(r.f64()?),
        f => return Err(Error::CorruptBlob(format!("bad free flag {f}"))),
    };
    let target = match r.u8()? {
        0 => LocusTarget::Center(u32::from_le_bytes(r.take()?)),
        1 => LocusTarget::Vertex(r.u8()?),
        t => return Err(Error::CorruptBlob(format!("bad target tag {t}"))),
    };
    let derived = r.pick(&DerivedKind::ALL, "derived kind")?;
    let samples = u32::from_le_bytes(r.take()?) as usize;
    let style = r.pick(&StyleMode::ALL, "style mode")?;
    let palette_seed = u64::from_le_bytes(r.take()?);
    let speed = r.f64()?;
    if !r.bytes.is_empty() {
        return Err(Error::CorruptBlob(format!("{} trailing bytes", r.bytes.len())));
    }
    let state = ExperimentState {
        schema_version: version,
        family,
        a,
        b,
        free,
        target,
        derived,
        samples,
        style,
        palette_seed,
        speed,
    };
    state.validate()?;
    Ok(state)
}
