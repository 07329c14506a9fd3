//! Plain-text committee serialization.
//!
//! Line-oriented, versioned, whitespace-separated. Floats use shortest
//! round-trip formatting, so `load(render(c))` reproduces the committee
//! bit for bit. The file also carries the feature scaler; a saved
//! committee classifies raw (unstandardized) rows.
//!
//! ```text
//! quorum-committee v1
//! classes 2
//! rating scores
//! scaler_means 0.5 1.25
//! scaler_stddevs 1.0 0.75
//! members 1
//! member knn
//! seed 42
//! param k 3
//! weights 2.25 1.5
//! knn 3 2 4 2
//! labels 0 0 1 1
//! row -0.5 0.1
//! ...
//! end
//! ```

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use quorum::learners::{elm, forest, knn, logreg, mlp, svm};
use quorum::{
    Committee, CommitteeMember, LearnerKind, LearnerSpec, RatingMode, Scaler, TrainedModel,
    WeightVector,
};

const MAGIC: &str = "quorum-committee v1";

fn push_floats(out: &mut String, tag: &str, values: &[f64]) {
    out.push_str(tag);
    for v in values {
        write!(out, " {v:?}").unwrap();
    }
    out.push('\n');
}

fn push_usizes(out: &mut String, tag: &str, values: &[usize]) {
    out.push_str(tag);
    for v in values {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
}

fn render_model(out: &mut String, model: &TrainedModel) {
    match model {
        TrainedModel::Knn(m) => {
            writeln!(out, "knn {} {} {} {}", m.k, m.m, m.rows, m.cols).unwrap();
            push_usizes(out, "labels", &m.labels);
            for row in m.features.chunks(m.cols) {
                push_floats(out, "row", row);
            }
        }
        TrainedModel::LogReg(m) => {
            writeln!(out, "logreg {} {}", m.d, m.m).unwrap();
            for row in m.weights.chunks(m.d) {
                push_floats(out, "w", row);
            }
            push_floats(out, "bias", &m.bias);
        }
        TrainedModel::RandomForest(m) => {
            writeln!(out, "random_forest {} {} {}", m.d, m.m, m.trees.len()).unwrap();
            for tree in &m.trees {
                writeln!(out, "tree {}", tree.nodes.len()).unwrap();
                for node in &tree.nodes {
                    match node {
                        forest::Node::Leaf { dist } => push_floats(out, "leaf", dist),
                        forest::Node::Split { feature, threshold, left, right } => {
                            writeln!(out, "split {feature} {threshold:?} {left} {right}")
                                .unwrap()
                        }
                    }
                }
            }
        }
        TrainedModel::Elm(m) => {
            writeln!(out, "elm {} {} {}", m.hidden, m.d, m.m).unwrap();
            for row in m.w.chunks(m.d) {
                push_floats(out, "w", row);
            }
            push_floats(out, "b", &m.b);
            for row in m.beta.chunks(m.m) {
                push_floats(out, "beta", row);
            }
        }
        TrainedModel::MlpBp(m) => {
            writeln!(out, "mlp_bp {} {} {}", m.hidden, m.d, m.m).unwrap();
            for row in m.w1.chunks(m.d) {
                push_floats(out, "w1", row);
            }
            push_floats(out, "b1", &m.b1);
            for row in m.w2.chunks(m.hidden) {
                push_floats(out, "w2", row);
            }
            push_floats(out, "b2", &m.b2);
        }
        TrainedModel::LinearSvm(m) => {
            writeln!(out, "linear_svm {} {}", m.d, m.m).unwrap();
            for row in m.weights.chunks(m.d) {
                push_floats(out, "w", row);
            }
            push_floats(out, "bias", &m.bias);
        }
    }
}

pub fn render(committee: &Committee, scaler: &Scaler) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "classes {}", committee.n_classes()).unwrap();
    writeln!(out, "rating {}", committee.rating_mode().name()).unwrap();
    push_floats(&mut out, "scaler_means", &scaler.means);
    push_floats(&mut out, "scaler_stddevs", &scaler.stddevs);
    writeln!(out, "members {}", committee.members().len()).unwrap();
    for member in committee.members() {
        writeln!(out, "member {}", member.spec.kind().name()).unwrap();
        writeln!(out, "seed {}", member.spec.seed()).unwrap();
        for (key, value) in member.spec.overrides() {
            writeln!(out, "param {key} {value:?}").unwrap();
        }
        push_floats(&mut out, "weights", member.weights.as_slice());
        render_model(&mut out, &member.model);
        writeln!(out, "end").unwrap();
    }
    out
}

struct Cursor<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { lines: text.lines(), line_no: 0 }
    }

    fn next(&mut self) -> Result<&'a str> {
        loop {
            let line = self.lines.next().ok_or_else(|| anyhow!("unexpected end of file"))?;
            self.line_no += 1;
            if !line.trim().is_empty() {
                return Ok(line.trim());
            }
        }
    }

    /// Next line, which must start with `tag`; returns the remainder.
    fn tagged(&mut self, tag: &str) -> Result<&'a str> {
        let line = self.next()?;
        match line.strip_prefix(tag) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim_start()),
            _ => bail!("line {}: expected `{}`, found {:?}", self.line_no, tag, line),
        }
    }

    fn floats(&mut self, tag: &str, expect: usize) -> Result<Vec<f64>> {
        let rest = self.tagged(tag)?;
        let line_no = self.line_no;
        let values: Vec<f64> = rest
            .split_whitespace()
            .map(|t| t.parse::<f64>().with_context(|| format!("line {line_no}: bad float {t:?}")))
            .collect::<Result<_>>()?;
        if values.len() != expect {
            bail!("line {}: expected {} values after `{}`, got {}", line_no, expect, tag, values.len());
        }
        Ok(values)
    }

    fn usizes(&mut self, tag: &str, expect: usize) -> Result<Vec<usize>> {
        let rest = self.tagged(tag)?;
        let line_no = self.line_no;
        let values: Vec<usize> = rest
            .split_whitespace()
            .map(|t| t.parse::<usize>().with_context(|| format!("line {line_no}: bad count {t:?}")))
            .collect::<Result<_>>()?;
        if values.len() != expect {
            bail!("line {}: expected {} values after `{}`, got {}", line_no, expect, tag, values.len());
        }
        Ok(values)
    }
}

fn flatten(rows: Vec<Vec<f64>>) -> Vec<f64> {
    rows.into_iter().flatten().collect()
}

fn parse_model(cur: &mut Cursor<'_>, kind: LearnerKind) -> Result<TrainedModel> {
    Ok(match kind {
        LearnerKind::Knn => {
            let head = cur.usizes("knn", 4)?;
            let (k, m, rows, cols) = (head[0], head[1], head[2], head[3]);
            let labels = cur.usizes("labels", rows)?;
            let mut features = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                features.extend(cur.floats("row", cols)?);
            }
            TrainedModel::Knn(knn::KnnModel { features, rows, cols, labels, k, m })
        }
        LearnerKind::LogReg => {
            let head = cur.usizes("logreg", 2)?;
            let (d, m) = (head[0], head[1]);
            let weights = flatten((0..m).map(|_| cur.floats("w", d)).collect::<Result<_>>()?);
            let bias = cur.floats("bias", m)?;
            TrainedModel::LogReg(logreg::LogRegModel { weights, bias, d, m })
        }
        LearnerKind::RandomForest => {
            let head = cur.usizes("random_forest", 3)?;
            let (d, m, n_trees) = (head[0], head[1], head[2]);
            let mut trees = Vec::with_capacity(n_trees);
            for _ in 0..n_trees {
                let n_nodes = cur.usizes("tree", 1)?[0];
                let mut nodes = Vec::with_capacity(n_nodes);
                for _ in 0..n_nodes {
                    let line = cur.next()?;
                    let line_no = cur.line_no;
                    if let Some(rest) = line.strip_prefix("leaf") {
                        let dist: Vec<f64> = rest
                            .split_whitespace()
                            .map(|t| {
                                t.parse::<f64>()
                                    .with_context(|| format!("line {line_no}: bad float {t:?}"))
                            })
                            .collect::<Result<_>>()?;
                        if dist.len() != m {
                            bail!("line {line_no}: leaf arity {} != {m}", dist.len());
                        }
                        nodes.push(forest::Node::Leaf { dist });
                    } else if let Some(rest) = line.strip_prefix("split") {
                        let parts: Vec<&str> = rest.split_whitespace().collect();
                        if parts.len() != 4 {
                            bail!("line {line_no}: split needs 4 fields");
                        }
                        nodes.push(forest::Node::Split {
                            feature: parts[0].parse()?,
                            threshold: parts[1].parse()?,
                            left: parts[2].parse()?,
                            right: parts[3].parse()?,
                        });
                    } else {
                        bail!("line {line_no}: expected leaf or split, found {line:?}");
                    }
                }
                trees.push(forest::CartTree { nodes });
            }
            TrainedModel::RandomForest(forest::ForestModel { trees, d, m })
        }
        LearnerKind::Elm => {
            let head = cur.usizes("elm", 3)?;
            let (hidden, d, m) = (head[0], head[1], head[2]);
            let w = flatten((0..hidden).map(|_| cur.floats("w", d)).collect::<Result<_>>()?);
            let b = cur.floats("b", hidden)?;
            let beta =
                flatten((0..hidden).map(|_| cur.floats("beta", m)).collect::<Result<_>>()?);
            TrainedModel::Elm(elm::ElmModel { w, b, beta, hidden, d, m })
        }
        LearnerKind::MlpBp => {
            let head = cur.usizes("mlp_bp", 3)?;
            let (hidden, d, m) = (head[0], head[1], head[2]);
            let w1 = flatten((0..hidden).map(|_| cur.floats("w1", d)).collect::<Result<_>>()?);
            let b1 = cur.floats("b1", hidden)?;
            let w2 = flatten((0..m).map(|_| cur.floats("w2", hidden)).collect::<Result<_>>()?);
            let b2 = cur.floats("b2", m)?;
            TrainedModel::MlpBp(mlp::MlpModel { w1, b1, w2, b2, hidden, d, m })
        }
        LearnerKind::LinearSvm => {
            let head = cur.usizes("linear_svm", 2)?;
            let (d, m) = (head[0], head[1]);
            let weights = flatten((0..m).map(|_| cur.floats("w", d)).collect::<Result<_>>()?);
            let bias = cur.floats("bias", m)?;
            TrainedModel::LinearSvm(svm::SvmModel { weights, bias, d, m })
        }
    })
}

pub fn parse(text: &str) -> Result<(Committee, Scaler)> {
    let mut cur = Cursor::new(text);
    let magic = cur.next()?;
    if magic != MAGIC {
        bail!("not a committee file (header {magic:?}, expected {MAGIC:?})");
    }
    let classes = cur.usizes("classes", 1)?[0];
    let rating_name = cur.tagged("rating")?;
    let rating = RatingMode::parse(rating_name)
        .ok_or_else(|| anyhow!("line {}: unknown rating mode {rating_name:?}", cur.line_no))?;
    let means = {
        let rest = cur.tagged("scaler_means")?;
        rest.split_whitespace().map(|t| t.parse::<f64>()).collect::<Result<Vec<_>, _>>()?
    };
    let stddevs = cur.floats("scaler_stddevs", means.len())?;
    let scaler = Scaler { means, stddevs };
    let n_members = cur.usizes("members", 1)?[0];

    let mut members = Vec::with_capacity(n_members);
    for _ in 0..n_members {
        let kind_name = cur.tagged("member")?;
        let kind = LearnerKind::parse(kind_name)
            .ok_or_else(|| anyhow!("line {}: unknown learner {kind_name:?}", cur.line_no))?;
        let seed = cur.usizes("seed", 1)?[0] as u64;
        let mut spec = LearnerSpec::new(kind).with_seed(seed);
        let mut line = cur.next()?;
        while let Some(rest) = line.strip_prefix("param ") {
            let (key, value) = rest
                .split_once(' ')
                .ok_or_else(|| anyhow!("line {}: param needs key and value", cur.line_no))?;
            spec.set(key, value.trim().parse()?)
                .with_context(|| format!("line {}: bad param", cur.line_no))?;
            line = cur.next()?;
        }
        let weights: Vec<f64> = line
            .strip_prefix("weights")
            .ok_or_else(|| anyhow!("line {}: expected `weights`, found {line:?}", cur.line_no))?
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()?;
        if weights.len() != classes {
            bail!("line {}: {} weights for {} classes", cur.line_no, weights.len(), classes);
        }
        let weights = WeightVector::new(weights)?;
        let model = parse_model(&mut cur, kind)?;
        let end = cur.next()?;
        if end != "end" {
            bail!("line {}: expected `end`, found {end:?}", cur.line_no);
        }
        members.push(CommitteeMember { spec, model, weights });
    }
    let committee = Committee::new(members, classes, rating)?;
    Ok((committee, scaler))
}

pub fn save(path: &std::path::Path, committee: &Committee, scaler: &Scaler) -> Result<()> {
    std::fs::write(path, render(committee, scaler))
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn load(path: &std::path::Path) -> Result<(Committee, Scaler)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).with_context(|| format!("{}: malformed committee file", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use quorum::{fit_committee, Dataset, WeightProtocol};

    fn toy() -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..12 {
            let t = i as f64;
            rows.push(vec![t, -t + 0.5]);
            labels.push(0);
            rows.push(vec![t + 0.25, t * t * 0.1]);
            labels.push(1);
        }
        Dataset::from_rows(rows, labels).unwrap()
    }

    fn full_committee() -> Committee {
        let specs: Vec<LearnerSpec> = LearnerKind::ALL
            .iter()
            .map(|&kind| {
                let spec = LearnerSpec::new(kind);
                match kind {
                    // Keep the file small; exercise the param lines too.
                    LearnerKind::RandomForest => spec.with("trees", 5.0).unwrap(),
                    LearnerKind::Elm => spec.with("hidden", 8.0).unwrap(),
                    LearnerKind::MlpBp => {
                        spec.with("hidden", 4.0).unwrap().with("max_iters", 50.0).unwrap()
                    }
                    LearnerKind::Knn => spec.with("k", 3.0).unwrap(),
                    _ => spec,
                }
            })
            .collect();
        fit_committee(&toy(), &specs, &WeightProtocol::Resubstitution, RatingMode::Scores, 9)
            .unwrap()
    }

    #[test]
    fn round_trips_every_learner_kind() {
        let committee = full_committee();
        let scaler = Scaler { means: vec![1.5, -0.25], stddevs: vec![2.0, 0.0] };
        let text = render(&committee, &scaler);
        let (back, scaler_back) = parse(&text).unwrap();
        assert_eq!(scaler_back, scaler);
        assert_eq!(back.n_classes(), committee.n_classes());
        assert_eq!(back.rating_mode(), committee.rating_mode());
        assert_eq!(back.members(), committee.members());
        // Bit-identical members mean bit-identical text on a second pass.
        assert_eq!(render(&back, &scaler_back), text);
    }

    #[test]
    fn loaded_committee_predicts_identically() {
        let committee = full_committee();
        let scaler = Scaler { means: vec![0.0, 0.0], stddevs: vec![1.0, 1.0] };
        let (back, _) = parse(&render(&committee, &scaler)).unwrap();
        let ds = toy();
        for i in 0..ds.n_rows() {
            assert_eq!(back.predict(ds.row(i)).unwrap(), committee.predict(ds.row(i)).unwrap());
        }
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("committee.txt");
        let committee = full_committee();
        let scaler = Scaler { means: vec![0.5, 0.5], stddevs: vec![1.5, 2.5] };
        save(&path, &committee, &scaler).unwrap();
        let (back, scaler_back) = load(&path).unwrap();
        assert_eq!(back.members().len(), 6);
        assert_eq!(scaler_back, scaler);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("not a committee\n").is_err());
        let committee = full_committee();
        let scaler = Scaler { means: vec![0.0, 0.0], stddevs: vec![1.0, 1.0] };
        let text = render(&committee, &scaler);
        // Truncations fail loudly rather than round down.
        let cut = &text[..text.len() / 2];
        assert!(parse(cut).is_err());
        let tampered = text.replace("weights", "weighs");
        assert!(parse(&tampered).is_err());
    }
}
