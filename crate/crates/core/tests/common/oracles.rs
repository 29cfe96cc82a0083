//! Independent reference implementations the library is checked against.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use codegraph::eval::FoldStats;
use codegraph::frontend::SourceLocation;
use codegraph::graph::{make_node_id, EdgeKind, GraphEdge, GraphNode, NodeKind, Ordinal, ProgramGraph, TurtlePath};
use codegraph::link::ForumPost;
use codegraph::suggest::PathDb;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LABELS: [&str; 6] = ["a.f", "a.f.g", "a.h", "b.k", "b.k.m", "a.f.g.n"];

/// Call nodes labeled from a small vocabulary plus one read node, with
/// flowsTo edges between arbitrary pairs (self loops and parallel edges with
/// different ordinals included).
pub fn synthetic(digest: &str, labels: &[usize], edges: &[(usize, usize, u8)]) -> ProgramGraph {
    let mut g = ProgramGraph::new(digest);
    let mut ids = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        let mut n = GraphNode::new(make_node_id(digest, "main", i as u64, NodeKind::Call), NodeKind::Call);
        n.label = TurtlePath::from_dotted(LABELS[l]);
        n.location = Some(SourceLocation {
            file: Arc::from("s.py"),
            start_line: i as u32 + 1,
            start_col: 1,
            end_line: i as u32 + 1,
            end_col: 5,
        });
        ids.push(g.add_node(n));
    }
    let mut read = GraphNode::new(make_node_id(digest, "main", 999, NodeKind::Read), NodeKind::Read);
    read.label = TurtlePath::from_dotted("a.f.attr");
    read.location = ids.first().and_then(|&i| g.node(i).unwrap().location.clone());
    let read = g.add_node(read);
    for &(a, b, o) in edges {
        let (Some(&src), Some(&dst)) = (ids.get(a), ids.get(b)) else { continue };
        g.merge_edge(GraphEdge::with_ordinal(src, dst, EdgeKind::FlowsTo, Ordinal::Position(o as u32)))
            .unwrap();
        if o == 2 {
            g.merge_edge(GraphEdge::new(src, dst, EdgeKind::ImmediatelyPrecedes)).ok();
            g.merge_edge(GraphEdge::with_ordinal(src, read, EdgeKind::FlowsTo, Ordinal::RECEIVER)).unwrap();
        }
    }
    g
}

// ---- brute-force path database ------------------------------------------

pub type Db = BTreeMap<Vec<String>, BTreeMap<String, u64>>;

pub fn call_labels(g: &ProgramGraph) -> Vec<(codegraph::graph::NodeId, String)> {
    g.nodes()
        .filter(|n| n.kind == NodeKind::Call)
        .map(|n| (n.id, n.label.as_ref().unwrap().to_string()))
        .collect()
}

/// Every sequence of distinct call nodes joined by flowsTo edges, found by
/// trying all tuples rather than walking adjacency.
pub fn brute_db(g: &ProgramGraph, max_len: usize) -> Db {
    let nodes = call_labels(g);
    let flows: BTreeSet<_> = g.edges_of_kind(EdgeKind::FlowsTo).map(|e| (e.src, e.dst)).collect();
    let mut db = Db::new();
    let mut tuples: Vec<Vec<usize>> = (0..nodes.len()).map(|i| vec![i]).collect();
    for len in 1..=max_len {
        for t in &tuples {
            let key: Vec<String> = t.iter().map(|&i| nodes[i].1.clone()).collect();
            let slot = db.entry(key).or_default();
            let last = nodes[*t.last().unwrap()].0;
            for (j, (id, label)) in nodes.iter().enumerate() {
                if !t.contains(&j) && flows.contains(&(last, *id)) {
                    *slot.entry(label.clone()).or_insert(0) += 1;
                }
            }
        }
        if len == max_len {
            break;
        }
        tuples = tuples
            .iter()
            .flat_map(|t| {
                (0..nodes.len())
                    .filter(|j| !t.contains(j) && flows.contains(&(nodes[*t.last().unwrap()].0, nodes[*j].0)))
                    .map(|j| [t.clone(), vec![j]].concat())
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    db
}

pub fn as_map(db: &PathDb) -> Db {
    db.entries().map(|(k, v)| (k.clone(), v.clone())).collect()
}

pub fn sum(dbs: impl IntoIterator<Item = Db>) -> Db {
    let mut out = Db::new();
    for db in dbs {
        for (k, v) in db {
            let slot = out.entry(k).or_default();
            for (l, n) in v {
                *slot.entry(l).or_insert(0) += n;
            }
        }
    }
    out
}

pub fn corpus20() -> Vec<ProgramGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    (0..20)
        .map(|i| {
            let n = rng.gen_range(2..=10);
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..LABELS.len())).collect();
            let edges: Vec<(usize, usize, u8)> = (0..rng.gen_range(1..=2 * n))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..3)))
                .collect();
            synthetic(&format!("g{i:02}"), &labels, &edges)
        })
        .collect()
}

pub fn brute_folds(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![usize::MAX; n];
    for p in 0..n {
        fold[perm[p]] = p % k;
    }
    fold
}

pub fn div(a: usize, b: usize) -> Option<f64> {
    if b == 0 {
        None
    } else {
        Some(a as f64 / b as f64)
    }
}

pub fn avg(xs: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = xs.iter().filter_map(|x| *x).collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

/// Per length: (per-fold stats, mean found, mean withSuccessors, mean avg).
pub type BruteReport = Vec<(Vec<FoldStats>, Option<f64>, Option<f64>, Option<f64>)>;

pub fn brute_eval(graphs: &[ProgramGraph], k: usize, max_len: usize, seed: u64) -> BruteReport {
    let folds = brute_folds(graphs.len(), k, seed);
    let dbs: Vec<Db> = graphs.iter().map(|g| brute_db(g, max_len)).collect();
    let mut per_len: Vec<Vec<FoldStats>> = vec![Vec::new(); max_len];
    for f in 0..k {
        let train = sum((0..graphs.len()).filter(|&i| folds[i] != f).map(|i| dbs[i].clone()));
        let test: BTreeSet<Vec<String>> = (0..graphs.len())
            .filter(|&i| folds[i] == f)
            .flat_map(|i| dbs[i].keys().cloned())
            .collect();
        for len in 1..=max_len {
            let paths: Vec<&Vec<String>> = test.iter().filter(|p| p.len() == len).collect();
            let found: Vec<&BTreeMap<String, u64>> = paths.iter().filter_map(|p| train.get(*p)).collect();
            let with: Vec<_> = found.iter().filter(|s| !s.is_empty()).collect();
            let distinct: usize = with.iter().map(|s| s.len()).sum();
            per_len[len - 1].push(FoldStats {
                paths: paths.len(),
                found: found.len(),
                with_successors: with.len(),
                found_fraction: div(found.len(), paths.len()),
                with_successors_fraction: div(with.len(), found.len()),
                avg_successors: div(distinct, with.len()),
            });
        }
    }
    per_len
        .into_iter()
        .map(|rows| {
            let f = avg(&rows.iter().map(|r| r.found_fraction).collect::<Vec<_>>());
            let w = avg(&rows.iter().map(|r| r.with_successors_fraction).collect::<Vec<_>>());
            let a = avg(&rows.iter().map(|r| r.avg_successors).collect::<Vec<_>>());
            (rows, f, w, a)
        })
        .collect()
}

pub fn pca_corpus() -> Vec<ProgramGraph> {
    (0..10)
        .map(|i| {
            let method = if i == 9 { "transform" } else { "fit" };
            let src = format!(
                "from sklearn.decomposition import PCA\nimport numpy as np\nX = np.load('x{i}.npy')\npca = PCA(n_components=2)\npca.{method}(X)\n"
            );
            super::analyze_src(&format!("pca{i}.py"), &src).1
        })
        .collect()
}

// ---- TF-IDF oracle --------------------------------------------------------

pub const WEIGHTS: [f64; 4] = [3.0, 1.0, 1.0, 2.0];

pub fn unescape(s: &str) -> String {
    let mut out = s.to_owned();
    for (from, to) in [("&lt;", "<"), ("&gt;", ">"), ("&quot;", "\""), ("&#39;", "'"), ("&amp;", "&")] {
        out = out.replace(from, to);
    }
    out
}

/// (prose, code spans) of an HTML fragment, scanning characters once.
pub fn html_parts(html: &str) -> (String, Vec<String>) {
    let mut prose = String::new();
    let mut code: Vec<String> = Vec::new();
    let mut in_code = false;
    let mut i = 0;
    let bytes = html.as_bytes();
    while i < bytes.len() {
        if html[i..].starts_with("<code>") {
            in_code = true;
            code.push(String::new());
            prose.push(' ');
            i += 6;
        } else if html[i..].starts_with("</code>") && in_code {
            in_code = false;
            i += 7;
        } else if in_code {
            let ch = html[i..].chars().next().unwrap();
            code.last_mut().unwrap().push(ch);
            i += ch.len_utf8();
        } else if bytes[i] == b'<' {
            prose.push(' ');
            i += html[i..].find('>').map_or(html.len() - i, |j| j + 1);
        } else {
            let ch = html[i..].chars().next().unwrap();
            prose.push(ch);
            i += ch.len_utf8();
        }
    }
    (unescape(&prose), code.iter().map(|c| unescape(c)).collect())
}

pub fn words(text: &str, keep_dots: bool) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() || ch == '_' || (keep_dots && ch == '.') {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            let t = if keep_dots { cur.trim_matches('.').to_owned() } else { cur.clone() };
            if !t.is_empty() {
                out.push(t);
            }
            cur.clear();
        }
    }
    out
}

pub fn brute_rank(name: &str, posts: &[ForumPost]) -> Vec<(u64, f64)> {
    let docs: Vec<[Vec<String>; 4]> = posts
        .iter()
        .map(|post| {
            let (qp, mut code) = html_parts(&post.question_body);
            let mut ap = String::new();
            for a in &post.answers {
                let (t, c) = html_parts(&a.body);
                ap += &t;
                ap.push(' ');
                code.extend(c);
            }
            [
                words(&unescape(&post.title), false),
                words(&qp, false),
                words(&ap, false),
                code.iter().flat_map(|c| words(c, true)).collect(),
            ]
        })
        .collect();
    let mut terms: BTreeSet<String> = name.split('.').map(str::to_lowercase).collect();
    terms.insert(name.to_lowercase());
    let head = name.split('.').next().unwrap().to_lowercase();
    let n = docs.len() as f64;
    let mut out = Vec::new();
    for (post, fields) in posts.iter().zip(&docs) {
        let anchored = fields[0].contains(&head)
            || fields[3].iter().any(|t| t.split('.').any(|c| c == head));
        let mut score = 0.0;
        for t in &terms {
            let df = docs.iter().filter(|d| d.iter().any(|f| f.contains(t))).count();
            if df == 0 {
                continue;
            }
            let idf = (1.0 + n / df as f64).ln();
            for (w, f) in WEIGHTS.iter().zip(fields) {
                let tf = f.iter().filter(|x| *x == t).count();
                if tf > 0 {
                    score += w * (1.0 + (tf as f64).ln()) * idf;
                }
            }
        }
        if anchored && score > 0.0 {
            out.push((post.post_id, score));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone)]
pub enum Arg {
    Var(usize),
    Int(u8),
}

#[derive(Debug, Clone)]
pub enum Stmt {
    /// `v{dst} = pd.{func}(args, kw=v)`
    ModuleCall { dst: usize, func: usize, args: Vec<Arg>, kw: Option<usize> },
    /// `v{dst} = v{recv}.{method}(args)` or a bare expression statement.
    MethodCall { dst: Option<usize>, recv: usize, method: usize, args: Vec<Arg> },
    Copy { dst: usize, src: usize },
}

pub const FUNCS: [&str; 3] = ["read_csv", "DataFrame", "concat"];
pub const METHODS: [&str; 4] = ["merge", "fit", "dropna", "plot"];
pub const VARS: usize = 4;

/// Drops statements that read unassigned variables, so every call resolves.
pub fn well_formed(stmts: Vec<Stmt>) -> Vec<Stmt> {
    let mut assigned = BTreeSet::new();
    let mut out = Vec::new();
    let args_ok = |args: &[Arg], a: &BTreeSet<usize>| {
        args.iter().all(|x| match x {
            Arg::Var(v) => a.contains(v),
            Arg::Int(_) => true,
        })
    };
    for s in stmts {
        let ok = match &s {
            Stmt::ModuleCall { args, kw, .. } => {
                args_ok(args, &assigned) && kw.is_none_or(|k| assigned.contains(&k))
            }
            Stmt::MethodCall { recv, args, .. } => assigned.contains(recv) && args_ok(args, &assigned),
            Stmt::Copy { src, .. } => assigned.contains(src),
        };
        if ok {
            match &s {
                Stmt::ModuleCall { dst, .. } | Stmt::Copy { dst, .. } => {
                    assigned.insert(*dst);
                }
                Stmt::MethodCall { dst: Some(d), .. } => {
                    assigned.insert(*d);
                }
                Stmt::MethodCall { dst: None, .. } => {}
            }
            out.push(s);
        }
    }
    out
}

pub fn render_args(args: &[Arg]) -> Vec<String> {
    args.iter()
        .map(|a| match a {
            Arg::Var(v) => format!("v{v}"),
            Arg::Int(n) => n.to_string(),
        })
        .collect()
}

pub fn render(stmts: &[Stmt]) -> String {
    let mut src = String::from("import pandas as pd\n");
    for s in stmts {
        let line = match s {
            Stmt::ModuleCall { dst, func, args, kw } => {
                let mut a = render_args(args);
                if let Some(k) = kw {
                    a.push(format!("key=v{k}"));
                }
                format!("v{dst} = pd.{}({})", FUNCS[*func], a.join(", "))
            }
            Stmt::MethodCall { dst, recv, method, args } => {
                let call = format!("v{recv}.{}({})", METHODS[*method], render_args(args).join(", "));
                match dst {
                    Some(d) => format!("v{d} = {call}"),
                    None => call,
                }
            }
            Stmt::Copy { dst, src } => format!("v{dst} = v{src}"),
        };
        src.push_str(&line);
        src.push('\n');
    }
    src
}

/// `(src label, src line) -kind[ord]-> dst` for edges leaving call nodes;
/// constants are described by value, calls by label and line.
pub type Fact = (String, u32, &'static str, String, String);

pub fn reference(stmts: &[Stmt]) -> BTreeSet<Fact> {
    let mut env: BTreeMap<usize, (String, u32)> = BTreeMap::new();
    let mut facts = BTreeSet::new();
    let mut prev: Option<(String, u32)> = None;
    let flows = |facts: &mut BTreeSet<Fact>, from: &(String, u32), ord: String, to: &(String, u32)| {
        facts.insert((from.0.clone(), from.1, "flowsTo", ord, format!("{}@{}", to.0, to.1)));
    };
    for (i, s) in stmts.iter().enumerate() {
        let line = i as u32 + 2;
        let (call, args, kw, dst, recv) = match s {
            Stmt::Copy { dst, src } => {
                let v = env[src].clone();
                env.insert(*dst, v);
                continue;
            }
            Stmt::ModuleCall { dst, func, args, kw } => {
                ((format!("pandas.{}", FUNCS[*func]), line), args, *kw, Some(*dst), None)
            }
            Stmt::MethodCall { dst, recv, method, args } => {
                let r = env[recv].clone();
                ((format!("{}.{}", r.0, METHODS[*method]), line), args, None, *dst, Some(r))
            }
        };
        if let Some(r) = recv {
            flows(&mut facts, &r, "0".into(), &call);
        }
        for (p, a) in args.iter().enumerate() {
            let ord = (p + 1).to_string();
            match a {
                Arg::Var(v) => flows(&mut facts, &env[v].clone(), ord, &call),
                Arg::Int(n) => {
                    facts.insert((call.0.clone(), call.1, "constantArg", ord, n.to_string()));
                }
            }
        }
        if let Some(k) = kw {
            flows(&mut facts, &env[&k].clone(), "key".into(), &call);
        }
        if let Some(p) = prev.replace(call.clone()) {
            facts.insert((p.0, p.1, "immediatelyPrecedes", String::new(), format!("{}@{}", call.0, call.1)));
        }
        if let Some(d) = dst {
            env.insert(d, call);
        }
    }
    facts
}

pub fn observed(g: &ProgramGraph) -> BTreeSet<Fact> {
    let mut facts = BTreeSet::new();
    for e in g.edges() {
        let src = g.node(e.src).unwrap();
        let dst = g.node(e.dst).unwrap();
        if src.kind != NodeKind::Call {
            continue;
        }
        let line = src.location.as_ref().unwrap().start_line;
        let target = match dst.kind {
            NodeKind::Constant => dst.constant.as_ref().unwrap().value.clone(),
            _ => format!("{}@{}", dst.label.as_ref().unwrap(), dst.location.as_ref().unwrap().start_line),
        };
        let ord = e.ordinal.as_ref().map(|o| o.to_string()).unwrap_or_default();
        facts.insert((src.label.as_ref().unwrap().to_string(), line, e.kind.as_str(), ord, target));
    }
    facts
}


/// A well-formed straight-line program of at most ten statements.
pub fn random_program(rng: &mut ChaCha8Rng) -> Vec<Stmt> {
    let arg = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            Arg::Var(rng.gen_range(0..VARS))
        } else {
            Arg::Int(rng.gen_range(0..50))
        }
    };
    let n = rng.gen_range(1..=10);
    let stmts = (0..n)
        .map(|_| {
            let args: Vec<Arg> = (0..rng.gen_range(0..3)).map(|_| arg(rng)).collect();
            match rng.gen_range(0..3) {
                0 => Stmt::ModuleCall {
                    dst: rng.gen_range(0..VARS),
                    func: rng.gen_range(0..FUNCS.len()),
                    args,
                    kw: rng.gen_bool(0.3).then(|| rng.gen_range(0..VARS)),
                },
                1 => Stmt::MethodCall {
                    dst: rng.gen_bool(0.7).then(|| rng.gen_range(0..VARS)),
                    recv: rng.gen_range(0..VARS),
                    method: rng.gen_range(0..METHODS.len()),
                    args,
                },
                _ => Stmt::Copy {
                    dst: rng.gen_range(0..VARS),
                    src: rng.gen_range(0..VARS),
                },
            }
        })
        .collect();
    well_formed(stmts)
}
