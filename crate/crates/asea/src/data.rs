//! Loading, synthesis, normalization, batching and fold assignment for
//! two-person skeleton sequences.
//!
//! On-disk clip format (SBU-compatible): one frame per line, a frame index
//! followed by 90 comma-separated floats — person 1 joints 1..15 as x,y,z
//! triples, then person 2.

use crate::error::{AseaError, Result};
use crate::tensor::Tensor;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use walkdir::WalkDir;

pub const SBU_CLASSES: [&str; 8] = [
    "approaching",
    "departing",
    "kicking",
    "pushing",
    "shaking_hands",
    "hugging",
    "exchanging_objects",
    "punching",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Sbu,
    Synthetic,
}

#[derive(Debug, Clone)]
pub struct SkeletonSequence {
    /// Layout `[C=3, T, M=2, N]`.
    pub coords: Tensor,
    pub label: usize,
    pub subject_id: String,
    pub source: Source,
}

impl SkeletonSequence {
    pub fn frames(&self) -> usize {
        self.coords.shape()[1]
    }

    pub fn joints(&self) -> usize {
        self.coords.shape()[3]
    }

    fn validate(&self) -> Result<()> {
        let s = self.coords.shape();
        if s.len() != 4 || s[0] != 3 || s[2] != 2 {
            return Err(AseaError::Data(format!("bad sequence layout {s:?}, want [3,T,2,N]")));
        }
        if s[1] < 2 {
            return Err(AseaError::Data(format!("sequence needs T >= 2, got {}", s[1])));
        }
        if !self.coords.all_finite() {
            return Err(AseaError::Data("non-finite joint coordinate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Batch {
    /// `[B, C=3, T, M=2, N]`, short sequences zero-padded along T.
    pub data: Tensor,
    pub labels: Vec<usize>,
    /// `[B, T]`, 1 = real frame.
    pub pad_mask: Tensor,
}

// ---------------------------------------------------------------------------
// SBU-format parsing
// ---------------------------------------------------------------------------

fn parse_clip_file(path: &Path, n_joints: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| AseaError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let want = 1 + n_joints * 3 * 2;
    let mut frames = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim().trim_end_matches(',');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != want {
            return Err(AseaError::Parse {
                file: path.display().to_string(),
                line: ln + 1,
                msg: format!("expected {want} fields, found {}", fields.len()),
            });
        }
        let mut vals = Vec::with_capacity(want - 1);
        for f in &fields[1..] {
            let v: f64 = f.parse().map_err(|_| AseaError::Parse {
                file: path.display().to_string(),
                line: ln + 1,
                msg: format!("bad float '{f}'"),
            })?;
            vals.push(v);
        }
        frames.push(vals);
    }
    Ok(frames)
}

fn frames_to_coords(frames: &[Vec<f64>], n_joints: usize) -> Tensor {
    let t_len = frames.len();
    Tensor::from_fn(&[3, t_len, 2, n_joints], |ix| {
        let (c, t, m, n) = (ix[0], ix[1], ix[2], ix[3]);
        frames[t][m * n_joints * 3 + n * 3 + c]
    })
}

fn coords_to_lines(coords: &Tensor) -> String {
    let t_len = coords.shape()[1];
    let n = coords.shape()[3];
    let mut out = String::new();
    for t in 0..t_len {
        out.push_str(&format!("{}", t + 1));
        for m in 0..2 {
            for j in 0..n {
                for c in 0..3 {
                    out.push(',');
                    out.push_str(&format!("{}", coords.at(&[c, t, m, j])));
                }
            }
        }
        out.push('\n');
    }
    out
}

fn find_pair_component(path: &Path) -> Option<String> {
    for comp in path.components() {
        let s = comp.as_os_str().to_string_lossy();
        // sXXsYY participant-pair folders
        if s.len() >= 4 && s.starts_with('s') {
            if let Some(pos) = s[1..].find('s') {
                let (a, b) = (&s[1..1 + pos], &s[2 + pos..]);
                if !a.is_empty()
                    && !b.is_empty()
                    && a.chars().all(|c| c.is_ascii_digit())
                    && b.chars().all(|c| c.is_ascii_digit())
                {
                    return Some(s.to_string());
                }
            }
        }
    }
    None
}

fn find_class_component(path: &Path) -> Option<usize> {
    // nearest two-digit ancestor directory naming a category 01..08
    // (run directories are three digits and must not match)
    let mut found = None;
    for comp in path.parent()?.components() {
        let s = comp.as_os_str().to_string_lossy();
        if s.len() == 2 && s.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(v) = s.parse::<usize>() {
                if (1..=8).contains(&v) {
                    found = Some(v - 1);
                }
            }
        }
    }
    found
}

/// Load an SBU-layout directory tree. Labels come from the 8-class category
/// directories (`01`..`08`); the participant-pair folder (`sXXsYY`) becomes
/// the subject id used for fold assignment.
pub fn load_sbu(root: &Path) -> Result<Vec<SkeletonSequence>> {
    let mut files: Vec<_> = WalkDir::new(root)
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.extension().map(|x| x == "txt").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(AseaError::Data(format!(
            "no .txt clips found under {}",
            root.display()
        )));
    }
    let mut out = Vec::new();
    for path in files {
        let frames = parse_clip_file(&path, 15)?;
        if frames.len() < 2 {
            eprintln!("warning: skipping clip with < 2 frames: {}", path.display());
            continue;
        }
        let label = find_class_component(&path).ok_or_else(|| {
            AseaError::Data(format!(
                "cannot derive class (01..08 directory) for {}",
                path.display()
            ))
        })?;
        let subject_id = find_pair_component(&path).ok_or_else(|| {
            AseaError::Data(format!(
                "cannot derive participant pair (sXXsYY directory) for {}",
                path.display()
            ))
        })?;
        let seq = SkeletonSequence {
            coords: frames_to_coords(&frames, 15),
            label,
            subject_id,
            source: Source::Sbu,
        };
        seq.validate()?;
        out.push(seq);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthClass {
    Approach,
    Depart,
    Handshake,
    Wave,
}

impl SynthClass {
    pub fn name(&self) -> &'static str {
        match self {
            SynthClass::Approach => "approach",
            SynthClass::Depart => "depart",
            SynthClass::Handshake => "handshake",
            SynthClass::Wave => "wave",
        }
    }

    pub fn all() -> Vec<SynthClass> {
        vec![
            SynthClass::Approach,
            SynthClass::Depart,
            SynthClass::Handshake,
            SynthClass::Wave,
        ]
    }
}

impl std::str::FromStr for SynthClass {
    type Err = AseaError;
    fn from_str(s: &str) -> Result<SynthClass> {
        match s {
            "approach" => Ok(SynthClass::Approach),
            "depart" => Ok(SynthClass::Depart),
            "handshake" => Ok(SynthClass::Handshake),
            "wave" => Ok(SynthClass::Wave),
            other => Err(AseaError::Config(format!("unknown synthetic class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub classes: Vec<SynthClass>,
    pub samples_per_class: usize,
    pub frames: usize,
    pub noise_sigma: f64,
}

impl Default for SynthSpec {
    fn default() -> SynthSpec {
        SynthSpec {
            classes: SynthClass::all(),
            samples_per_class: 50,
            frames: 20,
            noise_sigma: 0.01,
        }
    }
}

/// Rest pose of one 15-joint body, standing at the origin facing +x.
/// Joint order matches the SBU layout in `graph`.
const REST_POSE: [[f64; 3]; 15] = [
    [0.0, 1.7, 0.0],    // head
    [0.0, 1.5, 0.0],    // neck
    [0.0, 1.1, 0.0],    // torso
    [0.0, 1.45, 0.2],   // left shoulder
    [0.0, 1.15, 0.25],  // left elbow
    [0.1, 0.9, 0.25],   // left hand
    [0.0, 1.45, -0.2],  // right shoulder
    [0.0, 1.15, -0.25], // right elbow
    [0.1, 0.9, -0.25],  // right hand
    [0.0, 0.9, 0.12],   // left hip
    [0.0, 0.5, 0.12],   // left knee
    [0.0, 0.1, 0.12],   // left foot
    [0.0, 0.9, -0.12],  // right hip
    [0.0, 0.5, -0.12],  // right knee
    [0.0, 0.1, -0.12],  // right foot
];

const RIGHT_ELBOW: usize = 7;
const RIGHT_HAND: usize = 8;

fn synth_clip(class: SynthClass, t_len: usize, rng: &mut ChaCha8Rng, sigma: f64) -> Tensor {
    // Person 0 stands at x = -0.8 facing +x; person 1 mirrored at +0.8.
    let mut coords = Tensor::zeros(&[3, t_len, 2, 15]);
    for t in 0..t_len {
        let phase = t as f64 / (t_len - 1).max(1) as f64;
        for m in 0..2 {
            let facing = if m == 0 { 1.0 } else { -1.0 };
            let base_x = -0.8 * facing;
            let walk = match class {
                SynthClass::Approach => 0.5 * phase * facing,
                SynthClass::Depart => -0.5 * phase * facing,
                _ => 0.0,
            };
            for j in 0..15 {
                let p = REST_POSE[j];
                let mut x = base_x + walk + p[0] * facing;
                let mut y = p[1];
                let z = p[2] * facing;
                match class {
                    SynthClass::Handshake => {
                        // both right arms reach toward the midpoint (x = 0)
                        if j == RIGHT_HAND || j == RIGHT_ELBOW {
                            let reach = if j == RIGHT_HAND { 0.5 } else { 0.25 };
                            let osc = 0.5 * (1.0 - (2.0 * std::f64::consts::PI * phase).cos());
                            x += reach * osc * facing;
                            if j == RIGHT_HAND {
                                y += 0.2 * osc;
                            }
                        }
                    }
                    SynthClass::Wave => {
                        // person 0 waves one arm vertically
                        if m == 0 && (j == RIGHT_HAND || j == RIGHT_ELBOW) {
                            let amp = if j == RIGHT_HAND { 0.6 } else { 0.3 };
                            y += amp * (2.0 * std::f64::consts::PI * 2.0 * phase).sin().abs();
                        }
                    }
                    _ => {}
                }
                *coords.at_mut(&[0, t, m, j]) = x;
                *coords.at_mut(&[1, t, m, j]) = y;
                *coords.at_mut(&[2, t, m, j]) = z;
            }
        }
    }
    if sigma > 0.0 {
        for v in coords.data_mut() {
            // Box-Muller keeps us off rand_distr just for one gaussian
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            *v += sigma * z;
        }
    }
    coords
}

fn synth_subject_id(idx: usize) -> String {
    format!("pair{:02}", idx % 10)
}

/// Deterministic synthetic corpus. Same seed, same bits.
pub fn synthesize(spec: &SynthSpec, seed: u64) -> Result<Vec<SkeletonSequence>> {
    if spec.samples_per_class < 1 {
        return Err(AseaError::Config("samples_per_class must be >= 1".into()));
    }
    if spec.frames < 2 {
        return Err(AseaError::Config("synthetic frames must be >= 2".into()));
    }
    if spec.classes.is_empty() {
        return Err(AseaError::Config("at least one synthetic class required".into()));
    }
    let mut out = Vec::new();
    for (ci, &class) in spec.classes.iter().enumerate() {
        for idx in 0..spec.samples_per_class {
            let clip_seed = seed ^ ((ci as u64) << 40) ^ ((idx as u64) << 8) ^ 0x5eed;
            let mut rng = ChaCha8Rng::seed_from_u64(clip_seed);
            let coords = synth_clip(class, spec.frames, &mut rng, spec.noise_sigma);
            let seq = SkeletonSequence {
                coords,
                label: ci,
                subject_id: synth_subject_id(idx),
                source: Source::Synthetic,
            };
            seq.validate()?;
            out.push(seq);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub classes: Vec<String>,
    pub seed: u64,
    pub spec: SynthSpec,
}

/// Persist a synthetic corpus: one SBU-format file per clip under
/// `<dir>/<class>/clip_<idx>.txt`, plus `manifest.json`.
pub fn write_corpus(dir: &Path, seqs: &[SkeletonSequence], manifest: &CorpusManifest) -> Result<()> {
    let io_err = |p: &Path, e: std::io::Error| AseaError::Io {
        path: p.display().to_string(),
        source: e,
    };
    let mut per_class_count: BTreeMap<usize, usize> = BTreeMap::new();
    for seq in seqs {
        let class_name = manifest
            .classes
            .get(seq.label)
            .ok_or_else(|| AseaError::Data(format!("label {} outside manifest classes", seq.label)))?;
        let cdir = dir.join(class_name);
        std::fs::create_dir_all(&cdir).map_err(|e| io_err(&cdir, e))?;
        let idx = per_class_count.entry(seq.label).or_insert(0);
        let fpath = cdir.join(format!("clip_{:03}.txt", *idx));
        *idx += 1;
        std::fs::write(&fpath, coords_to_lines(&seq.coords)).map_err(|e| io_err(&fpath, e))?;
    }
    let mpath = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| AseaError::Format(format!("manifest serialization: {e}")))?;
    std::fs::write(&mpath, json).map_err(|e| io_err(&mpath, e))?;
    Ok(())
}

/// Load a synthetic corpus written by [`write_corpus`].
pub fn load_corpus(dir: &Path) -> Result<(Vec<SkeletonSequence>, CorpusManifest)> {
    let mpath = dir.join("manifest.json");
    let text = std::fs::read_to_string(&mpath).map_err(|e| AseaError::Io {
        path: mpath.display().to_string(),
        source: e,
    })?;
    let manifest: CorpusManifest = serde_json::from_str(&text)
        .map_err(|e| AseaError::Format(format!("bad manifest: {e}")))?;
    let mut out = Vec::new();
    for (label, class) in manifest.classes.iter().enumerate() {
        let cdir = dir.join(class);
        let mut files: Vec<_> = std::fs::read_dir(&cdir)
            .map_err(|e| AseaError::Io {
                path: cdir.display().to_string(),
                source: e,
            })?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "txt").unwrap_or(false))
            .collect();
        files.sort();
        for (idx, path) in files.iter().enumerate() {
            let frames = parse_clip_file(path, 15)?;
            if frames.len() < 2 {
                eprintln!("warning: skipping clip with < 2 frames: {}", path.display());
                continue;
            }
            out.push(SkeletonSequence {
                coords: frames_to_coords(&frames, 15),
                label,
                subject_id: synth_subject_id(idx),
                source: Source::Synthetic,
            });
        }
    }
    if out.is_empty() {
        return Err(AseaError::Data(format!("no clips under {}", dir.display())));
    }
    Ok((out, manifest))
}

// ---------------------------------------------------------------------------
// Normalization, batching, folds
// ---------------------------------------------------------------------------

/// Translate so the first frame's two-person joint centroid is the origin and
/// scale so person 1's first-frame torso length (neck to torso joint) is 1.
/// Zero-filled missing joints stay zero only in the sense of relative offsets;
/// normalization is a global affine map.
pub fn normalize(seq: &SkeletonSequence) -> SkeletonSequence {
    let coords = &seq.coords;
    let n = seq.joints();
    let mut centroid = [0.0f64; 3];
    for c in 0..3 {
        let mut s = 0.0;
        for m in 0..2 {
            for j in 0..n {
                s += coords.at(&[c, 0, m, j]);
            }
        }
        centroid[c] = s / (2 * n) as f64;
    }
    let scale = if n >= 3 {
        let mut d2 = 0.0;
        for c in 0..3 {
            let d = coords.at(&[c, 0, 0, 1]) - coords.at(&[c, 0, 0, 2]);
            d2 += d * d;
        }
        let torso = d2.sqrt();
        if torso > 1e-12 {
            1.0 / torso
        } else {
            eprintln!("warning: degenerate torso length, falling back to unit scale");
            1.0
        }
    } else {
        1.0
    };
    let out = Tensor::from_fn(coords.shape(), |ix| {
        (coords.at(ix) - centroid[ix[0]]) * scale
    });
    SkeletonSequence {
        coords: out,
        label: seq.label,
        subject_id: seq.subject_id.clone(),
        source: seq.source,
    }
}

/// Pack sequences into one batch, padding along T to the batch maximum
/// (or resampling every clip to `fixed_t` frames when given).
pub fn make_batch(seqs: &[&SkeletonSequence], fixed_t: Option<usize>) -> Result<Batch> {
    let b = seqs.len();
    if b == 0 {
        return Err(AseaError::Data("empty batch".into()));
    }
    let n = seqs[0].joints();
    for s in seqs {
        if s.joints() != n {
            return Err(AseaError::Data("mixed joint counts in one batch".into()));
        }
    }
    let t_max = match fixed_t {
        Some(t) => t,
        None => seqs.iter().map(|s| s.frames()).max().unwrap(),
    };
    let mut data = Tensor::zeros(&[b, 3, t_max, 2, n]);
    let mut pad = Tensor::zeros(&[b, t_max]);
    let mut labels = Vec::with_capacity(b);
    for (bi, seq) in seqs.iter().enumerate() {
        let t_real = seq.frames();
        labels.push(seq.label);
        for t in 0..t_max {
            let src_t = match fixed_t {
                // nearest-frame resampling onto the fixed grid
                Some(ft) => ((t as f64 + 0.5) * t_real as f64 / ft as f64) as usize,
                None => t,
            };
            if fixed_t.is_none() && t >= t_real {
                break;
            }
            let src_t = src_t.min(t_real - 1);
            *pad.at_mut(&[bi, t]) = 1.0;
            for c in 0..3 {
                for m in 0..2 {
                    for j in 0..n {
                        *data.at_mut(&[bi, c, t, m, j]) = seq.coords.at(&[c, src_t, m, j]);
                    }
                }
            }
        }
    }
    Ok(Batch { data, labels, pad_mask: pad })
}

/// Partition sequences into k (train, test) splits by participant pair.
pub fn make_folds(
    seqs: &[SkeletonSequence],
    k: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let mut by_pair: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in seqs.iter().enumerate() {
        by_pair.entry(&s.subject_id).or_default().push(i);
    }
    if by_pair.len() < k {
        return Err(AseaError::Config(format!(
            "need at least {k} participant pairs for {k}-fold CV, have {}",
            by_pair.len()
        )));
    }
    let mut pairs: Vec<&str> = by_pair.keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);
    let mut fold_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        fold_of.insert(p, i % k);
    }
    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (pair, idxs) in &by_pair {
            if fold_of[pair] == f {
                test.extend_from_slice(idxs);
            } else {
                train.extend_from_slice(idxs);
            }
        }
        folds.push((train, test));
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_clip(dir: &Path, rel: &str, body: &str) {
        let p = dir.join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        let mut f = std::fs::File::create(p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
    }

    fn constant_line(frame: usize, v: f64) -> String {
        let vals: Vec<String> = (0..90).map(|_| format!("{v}")).collect();
        format!("{frame},{}", vals.join(","))
    }

    #[test]
    fn sbu_line_all_half() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{}\n{}\n", constant_line(1, 0.5), constant_line(2, 0.5));
        write_clip(dir.path(), "s01s02/01/001/skeleton_pos.txt", &body);
        let seqs = load_sbu(dir.path()).unwrap();
        assert_eq!(seqs.len(), 1);
        let s = &seqs[0];
        assert_eq!(s.frames(), 2);
        assert_eq!(s.label, 0);
        assert_eq!(s.subject_id, "s01s02");
        for c in 0..3 {
            for j in 0..15 {
                assert_eq!(s.coords.at(&[c, 0, 0, j]), 0.5);
                assert_eq!(s.coords.at(&[c, 0, 1, j]), 0.5);
            }
        }
    }

    #[test]
    fn sbu_roundtrip_two_frames() {
        let dir = tempfile::tempdir().unwrap();
        let mut vals1: Vec<String> = Vec::new();
        let mut vals2: Vec<String> = Vec::new();
        for i in 0..90 {
            vals1.push(format!("{}", 0.01 * i as f64));
            vals2.push(format!("{}", 0.02 * i as f64));
        }
        let body = format!("1,{}\n2,{}\n", vals1.join(","), vals2.join(","));
        write_clip(dir.path(), "s03s04/05/001/skeleton_pos.txt", &body);
        let seqs = load_sbu(dir.path()).unwrap();
        let s = &seqs[0];
        assert_eq!(s.label, 4);
        // exact round-trip of a couple of spot values
        assert_eq!(s.coords.at(&[0, 0, 0, 0]), 0.0);
        assert_eq!(s.coords.at(&[2, 0, 0, 0]), 0.02);
        assert_eq!(s.coords.at(&[0, 1, 1, 0]), 0.02 * 45.0);
    }

    #[test]
    fn malformed_line_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{}\n1,2,3\n", constant_line(1, 0.1));
        write_clip(dir.path(), "s01s02/02/001/skeleton_pos.txt", &body);
        match load_sbu(dir.path()) {
            Err(AseaError::Parse { file, line, .. }) => {
                assert!(file.contains("skeleton_pos.txt"));
                assert_eq!(line, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn synthesize_deterministic_and_counts() {
        let spec = SynthSpec::default();
        let a = synthesize(&spec, 42).unwrap();
        let b = synthesize(&spec, 42).unwrap();
        assert_eq!(a.len(), 200);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.coords.data(), y.coords.data());
        }
    }

    #[test]
    fn approach_centroid_distance_strictly_decreasing() {
        let spec = SynthSpec {
            classes: vec![SynthClass::Approach],
            samples_per_class: 1,
            frames: 12,
            noise_sigma: 0.0,
        };
        let seq = &synthesize(&spec, 1).unwrap()[0];
        let mut prev = f64::INFINITY;
        for t in 0..12 {
            let mut c0 = [0.0; 3];
            let mut c1 = [0.0; 3];
            for c in 0..3 {
                for j in 0..15 {
                    c0[c] += seq.coords.at(&[c, t, 0, j]) / 15.0;
                    c1[c] += seq.coords.at(&[c, t, 1, j]) / 15.0;
                }
            }
            let d = ((c0[0] - c1[0]).powi(2) + (c0[1] - c1[1]).powi(2) + (c0[2] - c1[2]).powi(2))
                .sqrt();
            assert!(d < prev, "distance not decreasing at frame {t}");
            prev = d;
        }
    }

    #[test]
    fn normalize_fixed_point_and_translation_invariance() {
        let spec = SynthSpec {
            classes: vec![SynthClass::Handshake],
            samples_per_class: 1,
            frames: 6,
            noise_sigma: 0.05,
        };
        let seq = &synthesize(&spec, 9).unwrap()[0];
        let norm = normalize(seq);
        let renorm = normalize(&norm);
        for (a, b) in norm.coords.data().iter().zip(renorm.coords.data()) {
            assert!((a - b).abs() <= 1e-12);
        }
        // translation invariance
        let shifted = SkeletonSequence {
            coords: seq.coords.map(|v| v + 5.0),
            ..seq.clone()
        };
        let norm2 = normalize(&shifted);
        for (a, b) in norm.coords.data().iter().zip(norm2.coords.data()) {
            assert!((a - b).abs() <= 1e-9);
        }
        // frame-0 centroid at origin
        let n = norm.joints();
        for c in 0..3 {
            let mut s = 0.0;
            for m in 0..2 {
                for j in 0..n {
                    s += norm.coords.at(&[c, 0, m, j]);
                }
            }
            assert!((s / (2 * n) as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn folds_partition_and_pair_disjointness() {
        let spec = SynthSpec::default();
        let seqs = synthesize(&spec, 3).unwrap();
        let folds = make_folds(&seqs, 5, 7).unwrap();
        assert_eq!(folds.len(), 5);
        let mut seen = vec![0usize; seqs.len()];
        for (train, test) in &folds {
            for &i in test {
                seen[i] += 1;
            }
            let test_pairs: std::collections::BTreeSet<_> =
                test.iter().map(|&i| seqs[i].subject_id.clone()).collect();
            for &i in train {
                assert!(!test_pairs.contains(&seqs[i].subject_id), "pair leakage");
            }
            // 10 pairs, k = 5 -> 2 pairs per test fold
            assert_eq!(test_pairs.len(), 2);
        }
        assert!(seen.iter().all(|&c| c == 1), "test folds must partition the corpus");
    }

    #[test]
    fn folds_of_21_pairs_differ_by_at_most_one() {
        // pigeonhole over an SBU-sized pair list
        let mut seqs = Vec::new();
        for p in 0..21 {
            for _ in 0..3 {
                seqs.push(SkeletonSequence {
                    coords: Tensor::zeros(&[3, 4, 2, 15]),
                    label: 0,
                    subject_id: format!("s{:02}s{:02}", p, p + 1),
                    source: Source::Sbu,
                });
            }
        }
        let folds = make_folds(&seqs, 5, 0).unwrap();
        let sizes: Vec<usize> = folds
            .iter()
            .map(|(_, test)| {
                test.iter()
                    .map(|&i| seqs[i].subject_id.clone())
                    .collect::<std::collections::BTreeSet<_>>()
                    .len()
            })
            .collect();
        let (mn, mx) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(mx - mn <= 1, "fold pair counts {sizes:?}");
    }

    #[test]
    fn corpus_roundtrip() {
        let spec = SynthSpec {
            classes: SynthClass::all(),
            samples_per_class: 2,
            frames: 5,
            noise_sigma: 0.01,
        };
        let seqs = synthesize(&spec, 11).unwrap();
        let manifest = CorpusManifest {
            classes: spec.classes.iter().map(|c| c.name().to_string()).collect(),
            seed: 11,
            spec: spec.clone(),
        };
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path(), &seqs, &manifest).unwrap();
        let (loaded, m2) = load_corpus(dir.path()).unwrap();
        assert_eq!(loaded.len(), seqs.len());
        assert_eq!(m2.seed, 11);
        // text format uses shortest round-trip floats, so bits survive
        for (a, b) in seqs.iter().zip(&loaded) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.coords.data(), b.coords.data());
        }
    }

    #[test]
    fn batch_pads_and_masks() {
        let mk = |t: usize| SkeletonSequence {
            coords: Tensor::from_fn(&[3, t, 2, 15], |ix| ix[1] as f64 + 1.0),
            label: 0,
            subject_id: "p".into(),
            source: Source::Synthetic,
        };
        let (a, b) = (mk(3), mk(5));
        let batch = make_batch(&[&a, &b], None).unwrap();
        assert_eq!(batch.data.shape(), &[2, 3, 5, 2, 15]);
        assert_eq!(batch.pad_mask.at(&[0, 2]), 1.0);
        assert_eq!(batch.pad_mask.at(&[0, 3]), 0.0);
        assert_eq!(batch.data.at(&[0, 0, 4, 0, 0]), 0.0); // pad frame zeroed
        assert_eq!(batch.data.at(&[0, 0, 2, 0, 0]), 3.0);
        assert_eq!(batch.data.at(&[1, 0, 4, 1, 14]), 5.0);
    }
}
