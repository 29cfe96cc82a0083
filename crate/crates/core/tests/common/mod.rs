#![allow(dead_code)]

pub mod gen;
pub mod oracles;

use std::collections::BTreeSet;
use std::path::PathBuf;

use codegraph::dataflow::analyze_program;
use codegraph::docs::{extract_docs, module_name, DocEntry};
use codegraph::frontend::{collect_imports, parse_source, SourceFile, SyntaxTree};
use codegraph::graph::{GraphNode, NodeKind, ProgramGraph};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn analyze_file(file: &SourceFile) -> (SyntaxTree, ProgramGraph) {
    let tree = parse_source(file).unwrap();
    let imports = collect_imports(&tree);
    let g = analyze_program(&tree, &imports, file.digest()).unwrap();
    g.validate().unwrap();
    (tree, g)
}

pub fn analyze_src(name: &str, src: &str) -> (SyntaxTree, ProgramGraph) {
    analyze_file(&SourceFile::new(name, src))
}

/// Every `.py`/`.ipynb` file of a fixture directory, sorted by path.
pub fn fixture_sources(dir: &str) -> Vec<SourceFile> {
    let root = fixtures().join(dir);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("py" | "ipynb")))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let rel = p.file_name().unwrap().to_string_lossy().into_owned();
            SourceFile::new(rel, std::fs::read(&p).unwrap())
        })
        .collect()
}

pub fn corpus_graphs() -> Vec<ProgramGraph> {
    fixture_sources("corpus").iter().map(|f| analyze_file(f).1).collect()
}

/// Documentation entries of every module under `fixtures/libs`.
pub fn library_entries() -> Vec<DocEntry> {
    let root = fixtures().join("libs");
    let mut out = Vec::new();
    let mut stack = vec![root.clone()];
    let mut files = Vec::new();
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "py") {
                files.push(p);
            }
        }
    }
    files.sort();
    for p in files {
        let rel = p.strip_prefix(&root).unwrap();
        let module = module_name(rel).unwrap();
        let tree = parse_source(&SourceFile::read(&p).unwrap()).unwrap();
        out.extend(extract_docs(&module, &tree));
    }
    out
}

fn node_text(n: &GraphNode) -> String {
    let mut s = match (&n.label, &n.constant) {
        (Some(l), _) => format!("{}:{}", n.kind.as_str(), l),
        (None, Some(c)) => format!("const:{}", c.value),
        _ => n.kind.as_str().to_owned(),
    };
    if let Some(i) = n.element_index {
        s.push_str(&format!("#{i}"));
    }
    if let Some(loc) = &n.location {
        s.push_str(&format!("@{}:{}", loc.start_line, loc.start_col));
    }
    s
}

/// `src -kind[ord]-> dst` over readable node descriptions, one per edge.
pub fn render_edges(g: &ProgramGraph) -> BTreeSet<String> {
    g.edges()
        .map(|e| {
            let ord = e.ordinal.as_ref().map(|o| format!("[{o}]")).unwrap_or_default();
            format!(
                "{} -{}{}-> {}",
                node_text(g.node(e.src).unwrap()),
                e.kind.as_str(),
                ord,
                node_text(g.node(e.dst).unwrap())
            )
        })
        .collect()
}

pub fn calls(g: &ProgramGraph) -> Vec<&GraphNode> {
    g.nodes().filter(|n| n.kind == NodeKind::Call).collect()
}

// ---- strict N-Quads checker -------------------------------------------

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, b: u8) -> Result<(), String> {
        if self.peek() == Some(b) {
            self.i += 1;
            Ok(())
        } else {
            Err(format!("expected {:?} at {}", b as char, self.i))
        }
    }

    fn ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.i += 1;
        }
    }

    fn hex(&mut self, n: usize) -> Result<(), String> {
        for _ in 0..n {
            match self.peek() {
                Some(c) if c.is_ascii_hexdigit() => self.i += 1,
                _ => return Err(format!("bad hex escape at {}", self.i)),
            }
        }
        Ok(())
    }

    fn uchar(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(b'u') => {
                self.i += 1;
                self.hex(4)
            }
            Some(b'U') => {
                self.i += 1;
                self.hex(8)
            }
            _ => Err(format!("bad escape at {}", self.i)),
        }
    }

    fn iri(&mut self) -> Result<(), String> {
        self.eat(b'<')?;
        let start = self.i;
        loop {
            match self.peek() {
                None => return Err("unterminated IRI".into()),
                Some(b'>') => break,
                Some(b'\\') => {
                    self.i += 1;
                    self.uchar()?;
                }
                Some(c) if c <= 0x20 || b"<\"{}|^`".contains(&c) => {
                    return Err(format!("forbidden byte {c:#x} in IRI at {}", self.i))
                }
                Some(_) => self.i += 1,
            }
        }
        let body = std::str::from_utf8(&self.s[start..self.i]).map_err(|e| e.to_string())?;
        let scheme = body.split(':').next().unwrap_or("");
        let scheme_ok = body.contains(':')
            && scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c));
        if !scheme_ok {
            return Err(format!("relative IRI <{body}>"));
        }
        self.i += 1;
        Ok(())
    }

    fn blank(&mut self) -> Result<(), String> {
        self.eat(b'_')?;
        self.eat(b':')?;
        let start = self.i;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || b"_-.".contains(&c)) {
            self.i += 1;
        }
        if self.i == start || self.s[self.i - 1] == b'.' {
            return Err(format!("bad blank node label at {start}"));
        }
        Ok(())
    }

    fn literal(&mut self) -> Result<(), String> {
        self.eat(b'"')?;
        loop {
            match self.peek() {
                None | Some(b'\n' | b'\r') => return Err("unterminated literal".into()),
                Some(b'"') => break,
                Some(b'\\') => {
                    self.i += 1;
                    match self.peek() {
                        Some(b't' | b'b' | b'n' | b'r' | b'f' | b'"' | b'\'' | b'\\') => self.i += 1,
                        _ => self.uchar()?,
                    }
                }
                Some(_) => self.i += 1,
            }
        }
        self.i += 1;
        match self.peek() {
            Some(b'^') => {
                self.eat(b'^')?;
                self.eat(b'^')?;
                self.iri()
            }
            Some(b'@') => {
                self.i += 1;
                let start = self.i;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'-') {
                    self.i += 1;
                }
                if self.i == start {
                    return Err("empty language tag".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn subject(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(b'<') => self.iri(),
            Some(b'_') => self.blank(),
            _ => Err(format!("bad subject at {}", self.i)),
        }
    }

    fn object(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(b'"') => self.literal(),
            _ => self.subject(),
        }
    }
}

/// One statement with all four terms (the graph label is mandatory here).
pub fn check_quad_line(line: &str) -> Result<(), String> {
    let mut c = Cursor {
        s: line.as_bytes(),
        i: 0,
    };
    c.subject()?;
    c.ws();
    c.iri()?;
    c.ws();
    c.object()?;
    c.ws();
    c.subject()?;
    c.ws();
    c.eat(b'.')?;
    c.ws();
    if c.i != line.len() {
        return Err(format!("trailing input at {}", c.i));
    }
    Ok(())
}

/// Every line a valid quad, no duplicate lines, subjects in non-decreasing
/// IRI order, newline-terminated.
pub fn check_nquads(doc: &str) -> Result<usize, String> {
    if doc.is_empty() {
        return Ok(0);
    }
    if !doc.ends_with('\n') {
        return Err("document does not end with a newline".into());
    }
    let lines: Vec<&str> = doc.lines().collect();
    for (n, l) in lines.iter().enumerate() {
        check_quad_line(l).map_err(|e| format!("line {}: {e}: {l}", n + 1))?;
    }
    let unique: BTreeSet<&str> = lines.iter().copied().collect();
    if unique.len() != lines.len() {
        return Err("duplicate statements".into());
    }
    let subject = |l: &str| l.split(' ').next().unwrap().trim_matches(['<', '>']).to_owned();
    if lines.windows(2).any(|w| subject(w[0]) > subject(w[1])) {
        return Err("subjects are not sorted".into());
    }
    Ok(lines.len())
}
