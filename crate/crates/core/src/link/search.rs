//! TF-IDF index over forum posts with separate title, body, answer and code
//! fields.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ForumLink, ForumPost};
use crate::graph::TurtlePath;

/// Upper bound on results per query.
pub const MAX_MATCHES: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldWeights {
    pub title: f64,
    pub body: f64,
    pub answers: f64,
    pub code: f64,
}

impl Default for FieldWeights {
    fn default() -> Self {
        Self {
            title: 3.0,
            body: 1.0,
            answers: 1.0,
            code: 2.0,
        }
    }
}

impl FieldWeights {
    fn as_array(&self) -> [f64; FIELDS] {
        [self.title, self.body, self.answers, self.code]
    }
}

const FIELDS: usize = 4;
const TITLE: usize = 0;
const BODY: usize = 1;
const ANSWERS: usize = 2;
const CODE: usize = 3;

fn decode_entities(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}

/// Splits an HTML body into text outside `<code>` elements and the code
/// spans themselves, with tags removed.
fn split_body(html: &str) -> (String, Vec<String>) {
    let mut prose = String::new();
    let mut code = Vec::new();
    let mut rest = html;
    while let Some(start) = rest.find("<code>") {
        prose.push_str(&rest[..start]);
        prose.push(' ');
        let after = &rest[start + "<code>".len()..];
        match after.find("</code>") {
            Some(end) => {
                code.push(decode_entities(&after[..end]));
                rest = &after[end + "</code>".len()..];
            }
            None => {
                code.push(decode_entities(after));
                rest = "";
            }
        }
    }
    prose.push_str(rest);
    (decode_entities(&strip_tags(&prose)), code)
}

fn strip_tags(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut in_tag = false;
    for ch in html.chars() {
        match ch {
            '<' => {
                in_tag = true;
                out.push(' ');
            }
            '>' if in_tag => in_tag = false,
            c if !in_tag => out.push(c),
            _ => {}
        }
    }
    out
}

/// Lowercased words: maximal runs of alphanumerics and `_`.
pub fn tokenize_prose(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Lowercased code tokens: runs of alphanumerics, `_` and `.`, so dotted
/// names such as `sklearn.svm.SVC` stay whole.
pub fn tokenize_code(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.'))
        .map(|t| t.trim_matches('.'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone)]
struct PostTerms {
    post_id: u64,
    fields: [BTreeMap<String, u32>; FIELDS],
    /// Title words and every dotted component of code tokens.
    anchors: BTreeSet<String>,
}

fn counts(tokens: impl IntoIterator<Item = String>) -> BTreeMap<String, u32> {
    let mut m = BTreeMap::new();
    for t in tokens {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

#[derive(Debug, Clone)]
pub struct PostIndex {
    posts: Vec<PostTerms>,
    postings: BTreeMap<String, Vec<usize>>,
    weights: FieldWeights,
}

pub fn build_post_index(posts: &[ForumPost]) -> PostIndex {
    build_post_index_with(posts, FieldWeights::default())
}

pub fn build_post_index_with(posts: &[ForumPost], weights: FieldWeights) -> PostIndex {
    let mut terms = Vec::with_capacity(posts.len());
    let mut postings: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, p) in posts.iter().enumerate() {
        let (q_prose, mut code) = split_body(&p.question_body);
        let mut a_prose = String::new();
        for a in &p.answers {
            let (prose, c) = split_body(&a.body);
            a_prose.push_str(&prose);
            a_prose.push(' ');
            code.extend(c);
        }
        let code_tokens: Vec<String> = code.iter().flat_map(|c| tokenize_code(c)).collect();
        let title = tokenize_prose(&decode_entities(&p.title));
        let mut anchors: BTreeSet<String> = title.iter().cloned().collect();
        for t in &code_tokens {
            anchors.extend(t.split('.').filter(|s| !s.is_empty()).map(str::to_owned));
        }
        let fields = [
            counts(title),
            counts(tokenize_prose(&q_prose)),
            counts(tokenize_prose(&a_prose)),
            counts(code_tokens),
        ];
        let mut seen = BTreeSet::new();
        for f in &fields {
            for t in f.keys() {
                if seen.insert(t.clone()) {
                    postings.entry(t.clone()).or_default().push(i);
                }
            }
        }
        terms.push(PostTerms {
            post_id: p.post_id,
            fields,
            anchors,
        });
    }
    PostIndex {
        posts: terms,
        postings,
        weights,
    }
}

impl PostIndex {
    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// `ln(1 + N / df)`; 0 for terms in no post.
    pub fn idf(&self, term: &str) -> f64 {
        match self.postings.get(term) {
            Some(p) if !p.is_empty() => (1.0 + self.posts.len() as f64 / p.len() as f64).ln(),
            _ => 0.0,
        }
    }
}

/// Query terms for a name: the full dotted path plus each component,
/// lowercased and deduplicated.
pub fn query_terms(name: &TurtlePath) -> BTreeSet<String> {
    let mut terms = BTreeSet::new();
    terms.insert(name.to_string().to_lowercase());
    for c in name.components() {
        terms.insert(c.to_lowercase());
    }
    terms
}

/// Posts ranked by score (descending, ties by ascending post id); at most
/// `min(k, MAX_MATCHES)` results, each with a positive score and the first
/// path component present in the title or code.
pub fn link_posts(name: &TurtlePath, index: &PostIndex, k: usize) -> Vec<ForumLink> {
    let limit = k.min(MAX_MATCHES);
    if limit == 0 {
        return Vec::new();
    }
    let terms = query_terms(name);
    let head = name.components()[0].to_lowercase();
    let weights = index.weights.as_array();
    let mut scores: BTreeMap<usize, f64> = BTreeMap::new();
    for t in &terms {
        let Some(docs) = index.postings.get(t) else { continue };
        let idf = index.idf(t);
        for &d in docs {
            let post = &index.posts[d];
            let mut s = 0.0;
            for f in [TITLE, BODY, ANSWERS, CODE] {
                if let Some(&tf) = post.fields[f].get(t) {
                    s += weights[f] * (1.0 + (tf as f64).ln()) * idf;
                }
            }
            *scores.entry(d).or_insert(0.0) += s;
        }
    }
    let mut ranked: Vec<(usize, f64)> = scores
        .into_iter()
        .filter(|&(d, s)| s > 0.0 && index.posts[d].anchors.contains(&head))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(index.posts[a.0].post_id.cmp(&index.posts[b.0].post_id))
    });
    ranked.truncate(limit);
    ranked
        .into_iter()
        .map(|(d, score)| ForumLink {
            qualified_name: name.clone(),
            post_id: index.posts[d].post_id,
            score,
        })
        .collect()
}
