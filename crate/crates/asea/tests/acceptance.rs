//! End-to-end acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).

use std::process::Command;
use std::time::Instant;

use asea::atnac;
use asea::attention::{ea_forward, EaParams};
use asea::autodiff::Tape;
use asea::gradcheck;
use asea::model::{AseaConfig, AseaModel};
use asea::nn::ParamSet;
use asea::tensor::Tensor;
use asea::train::{cross_validate, train, TrainSpec};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn report(criterion: usize, ok: bool, detail: &str) {
    println!(
        "[{}] criterion {}: {}",
        if ok { "PASS" } else { "FAIL" },
        criterion,
        detail
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_asea"))
}

// ---------------------------------------------------------------------------
// 1. Gradient fidelity
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_gradient_fidelity() {
    let started = Instant::now();
    let rep = gradcheck::run(5).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let ok = rep.passed && secs < 60.0;
    report(
        1,
        ok,
        &format!(
            "gradient check over {} seeds, {} scalars, max rel err {:.3e} (tol {:.0e}), {:.1}s",
            rep.seeds, rep.scalars_checked, rep.max_rel_err, rep.tolerance, secs
        ),
    );
}

// ---------------------------------------------------------------------------
// 2. Equation oracles on >= 100 random instances
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_equation_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut selection_instances = 0usize;
    let mut worst_sel = 0.0f64;
    for _ in 0..100 {
        let b = rng.gen_range(1..3usize);
        let c = rng.gen_range(2..5usize);
        let t = rng.gen_range(2..6usize);
        let n = rng.gen_range(2..7usize);
        let gamma = rng.gen_range(0.0..3.0);
        let alpha = rng.gen_range(0.0..1.5);
        let x = Tensor::from_fn(&[b, c, t, n], |_| rng.gen_range(-2.0..2.0));
        let sel = atnac::select_from_features(&x, None, gamma, alpha).unwrap();
        for bi in 0..b {
            // loop oracle: energy, variance, weights, amplitude, threshold
            let e = |ti: usize, j: usize| -> f64 {
                (0..c).map(|ci| x.at(&[bi, ci, ti, j]).powi(2)).sum::<f64>().sqrt()
            };
            let var = |ti: usize| -> f64 {
                let mu = (0..n).map(|j| e(ti, j)).sum::<f64>() / n as f64;
                (0..n).map(|j| (e(ti, j) - mu).powi(2)).sum::<f64>() / n as f64
            };
            let mx = (0..t).map(|ti| gamma * var(ti)).fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = (0..t).map(|ti| (gamma * var(ti) - mx).exp()).sum();
            let w = |ti: usize| (gamma * var(ti) - mx).exp() / z;
            let s = |j: usize| (0..t).map(|ti| w(ti) * e(ti, j)).sum::<f64>();
            let mu_s = (0..n).map(s).sum::<f64>() / n as f64;
            let sd_s = ((0..n).map(|j| (s(j) - mu_s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let tau = mu_s + alpha * sd_s;
            for ti in 0..t {
                worst_sel = worst_sel.max((sel.variance.at(&[bi, ti]) - var(ti)).abs());
                worst_sel = worst_sel.max((sel.weights.at(&[bi, ti]) - w(ti)).abs());
                for j in 0..n {
                    worst_sel = worst_sel.max((sel.energies.at(&[bi, ti, j]) - e(ti, j)).abs());
                }
            }
            for j in 0..n {
                worst_sel = worst_sel.max((sel.amplitudes.at(&[bi, j]) - s(j)).abs());
            }
            worst_sel = worst_sel.max((sel.threshold.data()[bi] - tau).abs());
            // hard mask: strict threshold plus the non-empty safeguard
            let mut any = false;
            for j in 0..n {
                let want = if s(j) > tau { 1.0 } else { 0.0 };
                any = any || want == 1.0;
                if any || want == 1.0 {
                    // compare below after safeguard handling
                }
            }
            if any {
                for j in 0..n {
                    let want = if s(j) > tau { 1.0 } else { 0.0 };
                    assert_eq!(sel.mask.at(&[bi, j]), want);
                }
            } else {
                let total: f64 = (0..n).map(|j| sel.mask.at(&[bi, j])).sum();
                assert_eq!(total, 1.0);
            }
        }
        selection_instances += 1;
    }

    // attention against a gather-based oracle
    let mut attn_instances = 0usize;
    let mut worst_attn = 0.0f64;
    for _ in 0..100 {
        let (b, c, t) = (1usize, rng.gen_range(2..5usize), rng.gen_range(1..3usize));
        let n = rng.gen_range(2..6usize);
        let d = rng.gen_range(1..4usize);
        let mut ps = ParamSet::new();
        let mut prng = ChaCha8Rng::seed_from_u64(rng.gen());
        let p = EaParams::init(&mut ps, &mut prng, "ea", c, d).unwrap();
        let x = Tensor::from_fn(&[b, c, t, 2, n], |_| rng.gen_range(-1.0..1.0));
        // random masks with at least one active joint per person
        let mut mask = Tensor::from_fn(&[b, 2, n], |_| if rng.gen_bool(0.6) { 1.0 } else { 0.0 });
        for pi in 0..2 {
            if (0..n).all(|j| mask.at(&[0, pi, j]) == 0.0) {
                *mask.at_mut(&[0, pi, rng.gen_range(0..n)]) = 1.0;
            }
        }
        let pad = Tensor::full(&[b, t], 1.0);
        let mut tape = Tape::new();
        let binds = ps.bind(&mut tape);
        let xv = tape.leaf(x.clone());
        let (y, rec) = ea_forward(&mut tape, &binds, &p, xv, &mask, None, &pad).unwrap();
        let yv = tape.value(y);

        let wq = ps.tensor(p.w_q.w);
        let wk = ps.tensor(p.w_k.w);
        let wv = ps.tensor(p.w_v.w);
        let wo = ps.tensor(p.w_o.w);
        let bo = ps.tensor(p.w_o.b.unwrap());
        let proj = |w: &Tensor, ti: usize, j: usize, person: usize| -> Vec<f64> {
            (0..d)
                .map(|dd| (0..c).map(|ci| x.at(&[0, ci, ti, person, j]) * w.at(&[ci, dd])).sum())
                .collect()
        };
        for ti in 0..t {
            for (qp, kp) in [(0usize, 1usize), (1, 0)] {
                // the oracle gathers the active keys and never masks
                let keys: Vec<usize> =
                    (0..n).filter(|&j| mask.at(&[0, kp, j]) == 1.0).collect();
                for qj in 0..n {
                    let q = proj(wq, ti, qj, qp);
                    let logits: Vec<f64> = keys
                        .iter()
                        .map(|&kj| {
                            let k = proj(wk, ti, kj, kp);
                            q.iter().zip(&k).map(|(a, b)| a * b).sum::<f64>() / (d as f64).sqrt()
                        })
                        .collect();
                    let mx = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let z: f64 = logits.iter().map(|l| (l - mx).exp()).sum();
                    let weights: Vec<f64> = logits.iter().map(|l| (l - mx).exp() / z).collect();
                    let q_active = mask.at(&[0, qp, qj]) == 1.0;
                    for (ki, &kj) in keys.iter().enumerate() {
                        let want = if q_active { weights[ki] } else { 0.0 };
                        worst_attn =
                            worst_attn.max((rec.alpha[qp].at(&[0, ti, qj, kj]) - want).abs());
                    }
                    let mut att = vec![0.0; d];
                    for (ki, &kj) in keys.iter().enumerate() {
                        let v = proj(wv, ti, kj, kp);
                        for dd in 0..d {
                            att[dd] += weights[ki] * v[dd];
                        }
                    }
                    for ci in 0..c {
                        let o: f64 =
                            (0..d).map(|dd| att[dd] * wo.at(&[dd, ci])).sum::<f64>() + bo.data()[ci];
                        let want =
                            x.at(&[0, ci, ti, qp, qj]) + if q_active { o } else { 0.0 };
                        worst_attn = worst_attn.max((yv.at(&[0, ci, ti, qp, qj]) - want).abs());
                    }
                }
            }
        }
        attn_instances += 1;
    }
    let ok = worst_sel <= 1e-9 && worst_attn <= 1e-9;
    report(
        2,
        ok,
        &format!(
            "selection pipeline vs loop oracle on {selection_instances} instances \
             (max abs err {worst_sel:.2e}), attention vs gather oracle on \
             {attn_instances} instances (max abs err {worst_attn:.2e}), tol 1e-9"
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. Selection invariant suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_selection_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..50 {
        let (b, c, t, n) = (2usize, 3usize, rng.gen_range(2..6), rng.gen_range(2..8));
        let x = Tensor::from_fn(&[b, c, t, n], |_| rng.gen_range(-2.0..2.0));
        let gamma = rng.gen_range(0.0..4.0);
        let sel = atnac::select_from_features(&x, None, gamma, 0.5).unwrap();
        for bi in 0..b {
            // weights form a distribution
            let wsum: f64 = (0..t).map(|ti| sel.weights.at(&[bi, ti])).sum();
            assert!((wsum - 1.0).abs() <= 1e-9);
            // never an empty selection
            let active: f64 = (0..n).map(|j| sel.mask.at(&[bi, j])).sum();
            assert!(active >= 1.0);
        }
        // joint-permutation equivariance of amplitudes and mask
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let xp = Tensor::from_fn(&[b, c, t, n], |ix| x.at(&[ix[0], ix[1], ix[2], perm[ix[3]]]));
        let selp = atnac::select_from_features(&xp, None, gamma, 0.5).unwrap();
        for bi in 0..b {
            for j in 0..n {
                assert!(
                    (selp.amplitudes.at(&[bi, j]) - sel.amplitudes.at(&[bi, perm[j]])).abs()
                        <= 1e-9
                );
                assert_eq!(selp.mask.at(&[bi, j]), sel.mask.at(&[bi, perm[j]]));
            }
        }
        // monotone shrinkage of the active set over the threshold coefficient
        let grid = [0.0, 0.25, 0.5, 1.0];
        let masks: Vec<Tensor> = grid
            .iter()
            .map(|&a| atnac::select_active(&sel.amplitudes, a).3)
            .collect();
        for w in masks.windows(2) {
            for (hi_alpha, lo_alpha) in w[1].data().iter().zip(w[0].data()) {
                assert!(hi_alpha <= lo_alpha);
            }
        }
    }
    // worked example
    let s = Tensor::new(vec![1, 4], vec![0.0, 0.0, 0.0, 10.0]).unwrap();
    let (_, _, tau, mask) = atnac::select_active(&s, 0.5);
    let tau_want = 2.5 + 0.5 * 18.75f64.sqrt();
    let ok = (tau.data()[0] - tau_want).abs() <= 1e-9 && mask.data() == [0.0, 0.0, 0.0, 1.0];
    report(
        3,
        ok,
        &format!(
            "weight normalization, non-empty selection, permutation equivariance, \
             monotone shrinkage over 50 instances; worked example tau = {:.4}, mask {:?}",
            tau.data()[0],
            mask.data()
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. Attention invariant suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_attention_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut ps = ParamSet::new();
    let mut prng = ChaCha8Rng::seed_from_u64(9);
    let (c, d, n, t) = (4usize, 2usize, 5usize, 2usize);
    let p = EaParams::init(&mut ps, &mut prng, "ea", c, d).unwrap();
    let pad = Tensor::full(&[1, t], 1.0);
    let mut identity_exact = true;
    let mut row_stochastic = true;
    let mut symmetric = true;
    for _ in 0..25 {
        let x = Tensor::from_fn(&[1, c, t, 2, n], |_| rng.gen_range(-1.0..1.0));
        let mut mask = Tensor::from_fn(&[1, 2, n], |_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 });
        for pi in 0..2 {
            if (0..n).all(|j| mask.at(&[0, pi, j]) == 0.0) {
                *mask.at_mut(&[0, pi, 0]) = 1.0;
            }
        }
        let run = |xs: &Tensor, ms: &Tensor| {
            let mut tape = Tape::new();
            let binds = ps.bind(&mut tape);
            let xv = tape.leaf(xs.clone());
            let (y, rec) = ea_forward(&mut tape, &binds, &p, xv, ms, None, &pad).unwrap();
            (tape.value(y).clone(), rec)
        };
        let (y, rec) = run(&x, &mask);
        for pi in 0..2 {
            for ti in 0..t {
                for qj in 0..n {
                    let row: f64 = (0..n).map(|kj| rec.alpha[pi].at(&[0, ti, qj, kj])).sum();
                    if mask.at(&[0, pi, qj]) == 1.0 {
                        // rows of active queries are stochastic over unmasked keys
                        row_stochastic &= (row - 1.0).abs() <= 1e-9;
                    } else {
                        row_stochastic &= row == 0.0;
                        // inactive queries pass through bit-exact
                        for ci in 0..c {
                            identity_exact &=
                                y.at(&[0, ci, ti, pi, qj]) == x.at(&[0, ci, ti, pi, qj]);
                        }
                    }
                }
            }
        }
        // person-swap symmetry
        let xs = Tensor::from_fn(x.shape(), |ix| x.at(&[ix[0], ix[1], ix[2], 1 - ix[3], ix[4]]));
        let ms = Tensor::from_fn(mask.shape(), |ix| mask.at(&[ix[0], 1 - ix[1], ix[2]]));
        let (ys, _) = run(&xs, &ms);
        for ci in 0..c {
            for ti in 0..t {
                for pi in 0..2 {
                    for j in 0..n {
                        symmetric &= (ys.at(&[0, ci, ti, pi, j])
                            - y.at(&[0, ci, ti, 1 - pi, j]))
                        .abs()
                            <= 1e-9;
                    }
                }
            }
        }
    }
    // mask-vs-gather equivalence is covered quantitatively by criterion 2;
    // here assert the structural pieces
    let ok = identity_exact && row_stochastic && symmetric;
    report(
        4,
        ok,
        &format!(
            "row-stochastic rows: {row_stochastic}, bit-exact inactive-query identity: \
             {identity_exact}, person-swap symmetry: {symmetric} (25 instances)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. Loss contract
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_loss_contract() {
    // uniform 4-class logits -> ln 4; alpha at target -> zero regularizer
    let cfg = gradcheck::tiny_config();
    let m = AseaModel::new(cfg.clone()).unwrap();
    let mut tape = Tape::new();
    let binds = m.params.bind(&mut tape);
    let logits = tape.leaf(Tensor::zeros(&[2, 4]));
    let loss = m.loss(&mut tape, logits, &[0, 3], &binds).unwrap();
    let task = m.task_loss(&mut tape, logits, &[0, 3]).unwrap();
    let uniform_ok = (tape.value(loss).item() - (4.0f64).ln()).abs() <= 1e-9;
    let reg_zero_exact = tape.value(loss).item() == tape.value(task).item();

    // strong anchoring: lambda = 10 keeps alpha within 0.05 of the target
    // over 200 optimizer steps
    let mut anchored_cfg = cfg;
    anchored_cfg.lambda = 10.0;
    let mut model = AseaModel::new(anchored_cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let seqs: Vec<asea::data::SkeletonSequence> = (0..8)
        .map(|i| asea::data::SkeletonSequence {
            coords: Tensor::from_fn(&[3, 6, 2, 5], |_| rng.gen_range(-0.5..0.5)),
            label: i % 4,
            subject_id: format!("pair{}", i % 2),
            source: asea::data::Source::Synthetic,
        })
        .collect();
    let refs: Vec<&asea::data::SkeletonSequence> = seqs.iter().collect();
    // 8 clips / batch 4 = 2 steps per epoch -> 100 epochs = 200 steps
    let spec = TrainSpec { epochs: 100, batch_size: 4, ..TrainSpec::default() };
    let report_run = train(&mut model, &refs, &[], &spec).unwrap();
    let drift = report_run
        .epochs
        .iter()
        .map(|e| (e.alpha - 0.5).abs())
        .fold(0.0, f64::max);
    let ok = uniform_ok && reg_zero_exact && drift <= 0.05;
    report(
        5,
        ok,
        &format!(
            "uniform logits give ln 4 (ok: {uniform_ok}), on-target alpha gives exactly \
             zero regularizer (ok: {reg_zero_exact}), max |alpha - 0.5| over 200 steps \
             at lambda=10: {drift:.4} (limit 0.05)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 6. Synthetic end-to-end + ablation table in one command
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_synthetic_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let status = bin()
        .args(["synth", "--out"])
        .arg(&corpus)
        .args(["--seed", "0"])
        .status()
        .unwrap();
    assert!(status.success());

    // full model, default configuration, 80/20 split by participant pair
    let started = Instant::now();
    let report_path = dir.path().join("train.json");
    let status = bin()
        .args(["train", "--data"])
        .arg(&corpus)
        .args(["--epochs", "10", "--seed", "0", "--out"])
        .arg(&report_path)
        .status()
        .unwrap();
    assert!(status.success());
    let secs = started.elapsed().as_secs_f64();
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let acc = rep["eval"]["accuracy"].as_f64().unwrap();
    let total = rep["eval"]["total"].as_u64().unwrap();

    // ablation table in one command
    let ab_path = dir.path().join("ablation.json");
    let csv_path = dir.path().join("ablation.csv");
    let status = bin()
        .args(["ablate", "--data"])
        .arg(&corpus)
        .args([
            "--arms",
            "baseline,all-node-ea,atnac,velocity",
            "--epochs",
            "2",
            "--seed",
            "0",
            "--set",
            "widths=8,16",
            "--out",
        ])
        .arg(&ab_path)
        .args(["--csv"])
        .arg(&csv_path)
        .status()
        .unwrap();
    assert!(status.success());
    let ab: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&ab_path).unwrap()).unwrap();
    let arms = ab["ablation"]["arms"].as_array().unwrap();
    assert_eq!(arms.len(), 4);
    let acc_of = |name: &str| {
        arms.iter()
            .find(|a| a["name"] == name)
            .unwrap()["accuracy"]
            .as_f64()
            .unwrap()
    };
    // reference ordering is logged, not gated
    println!(
        "ablation accuracies (2 epochs): atnac {:.3}, all-node-ea {:.3}, baseline {:.3}, \
         velocity {:.3}; reference expectation atnac >= all-node-ea >= baseline",
        acc_of("atnac"),
        acc_of("all-node-ea"),
        acc_of("baseline"),
        acc_of("velocity")
    );
    assert!(std::fs::read_to_string(&csv_path).unwrap().lines().count() == 5);

    let ok = acc >= 0.80 && secs < 600.0;
    report(
        6,
        ok,
        &format!(
            "held-out accuracy {acc:.3} on {total} clips within 10 epochs in {secs:.0}s \
             (limits: >= 0.80, < 600s); 4-arm ablation table produced in one command"
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. SBU 5-fold protocol (conditional on the dataset)
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_sbu_protocol() {
    let Ok(dir) = std::env::var("ASEA_SBU_DIR") else {
        report(
            7,
            true,
            "skipped — set ASEA_SBU_DIR to an SBU-format dataset to run the 5-fold protocol",
        );
        return;
    };
    let (seqs, _) = asea::cli::load_dataset(std::path::Path::new(&dir), true).unwrap();
    let epochs: usize = std::env::var("ASEA_SBU_EPOCHS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(2);
    let cfg = AseaConfig::default();
    let spec = TrainSpec { epochs, ..TrainSpec::default() };
    // cross_validate fails loudly on any participant-pair leakage
    let cv = cross_validate(&cfg, &spec, &seqs, 5).unwrap();
    for f in &cv.folds {
        println!(
            "fold {}: {} train / {} test clips, accuracy {:.4}",
            f.fold, f.train_clips, f.test_clips, f.accuracy
        );
    }
    report(
        7,
        cv.folds.len() == 5,
        &format!(
            "5-fold protocol on {} clips, zero leakage verified, mean accuracy {:.4} \
             ({} epochs per fold; no numeric gate)",
            seqs.len(),
            cv.mean_accuracy,
            epochs
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. Determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    // same seed -> byte-identical corpora
    let mut corpora = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("corpus{run}"));
        let status = bin()
            .args(["synth", "--out"])
            .arg(&out)
            .args(["--seed", "7", "--samples-per-class", "3"])
            .status()
            .unwrap();
        assert!(status.success());
        corpora.push(out);
    }
    let mut clip_files = 0usize;
    for entry in walk(&corpora[0]) {
        let rel = entry.strip_prefix(&corpora[0]).unwrap();
        let twin = corpora[1].join(rel);
        assert_eq!(
            std::fs::read(&entry).unwrap(),
            std::fs::read(&twin).unwrap(),
            "corpus file {rel:?} differs between identical runs"
        );
        clip_files += 1;
    }

    // same seed -> identical training report (modulo wall clock) + checkpoint
    let mut reports = Vec::new();
    let mut ckpts = Vec::new();
    for run in 0..2 {
        let rep = dir.path().join(format!("report{run}.json"));
        let ck = dir.path().join(format!("model{run}.ckpt"));
        let status = bin()
            .args(["train", "--data"])
            .arg(&corpora[0])
            .args([
                "--epochs",
                "2",
                "--seed",
                "3",
                "--set",
                "widths=8,8",
                "--out",
            ])
            .arg(&rep)
            .args(["--checkpoint"])
            .arg(&ck)
            .status()
            .unwrap();
        assert!(status.success());
        reports.push(std::fs::read_to_string(&rep).unwrap());
        ckpts.push(std::fs::read(&ck).unwrap());
    }
    let strip = |s: &str| -> String {
        s.lines().filter(|l| !l.contains("wall_clock")).collect::<Vec<_>>().join("\n")
    };
    let reports_match = strip(&reports[0]) == strip(&reports[1]);
    let ckpts_match = ckpts[0] == ckpts[1];
    let ok = reports_match && ckpts_match && clip_files > 0;
    report(
        8,
        ok,
        &format!(
            "{clip_files} corpus files byte-identical across reruns; training report \
             identical modulo wall-clock lines: {reports_match}; checkpoint byte-identical: \
             {ckpts_match}"
        ),
    );
}

fn walk(root: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}
