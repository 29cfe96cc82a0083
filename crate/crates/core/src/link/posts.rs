//! Forum post archives: the public XML dump (`<row .../>` elements) or a
//! JSON-lines fixture with the same fields.

use std::collections::BTreeMap;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Answer {
    pub answer_id: u64,
    pub body: String,
    pub votes: i64,
}

/// A question with its answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ForumPost {
    pub post_id: u64,
    pub title: String,
    pub question_body: String,
    pub answers: Vec<Answer>,
    pub tags: Vec<String>,
    pub votes: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("post archive is neither an XML dump nor JSON lines")]
    Unrecognized,
    #[error("malformed XML dump: {0}")]
    Xml(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ingested {
    /// Ordered by post id; answers ordered by answer id.
    pub posts: Vec<ForumPost>,
    /// Rows dropped as malformed or orphaned.
    pub skipped: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Row {
    id: Option<u64>,
    post_type_id: Option<u32>,
    parent_id: Option<u64>,
    title: Option<String>,
    body: Option<String>,
    tags: Option<Tags>,
    score: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Tags {
    List(Vec<String>),
    Packed(String),
}

impl Tags {
    fn into_vec(self) -> Vec<String> {
        match self {
            Tags::List(v) => v,
            Tags::Packed(s) => split_tags(&s),
        }
    }
}

/// `<python><pandas>` or `|python|pandas|`.
fn split_tags(s: &str) -> Vec<String> {
    s.split(['<', '>', '|'])
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn ingest_posts(archive: &str) -> Result<Ingested, FormatError> {
    let trimmed = archive.trim_start_matches('\u{feff}').trim_start();
    let (rows, malformed) = if trimmed.starts_with('<') {
        xml_rows(trimmed)?
    } else if trimmed.starts_with('{') {
        json_rows(trimmed)
    } else if trimmed.is_empty() {
        (Vec::new(), 0)
    } else {
        return Err(FormatError::Unrecognized);
    };
    Ok(join(rows, malformed))
}

fn json_rows(text: &str) -> (Vec<Row>, usize) {
    let mut rows = Vec::new();
    let mut bad = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match serde_json::from_str::<Row>(line) {
            Ok(r) => rows.push(r),
            Err(_) => bad += 1,
        }
    }
    (rows, bad)
}

fn xml_rows(text: &str) -> Result<(Vec<Row>, usize), FormatError> {
    let mut reader = Reader::from_str(text);
    let mut rows = Vec::new();
    let mut bad = 0;
    loop {
        match reader.read_event() {
            Ok(Event::Empty(e)) | Ok(Event::Start(e)) if e.name().as_ref() == b"row" => {
                let mut row = Row::default();
                let mut ok = true;
                for attr in e.attributes() {
                    let Ok(attr) = attr else {
                        ok = false;
                        break;
                    };
                    let Ok(value) = attr.unescape_value() else {
                        ok = false;
                        break;
                    };
                    let value = value.into_owned();
                    match attr.key.as_ref() {
                        b"Id" => match value.parse() {
                            Ok(id) => row.id = Some(id),
                            Err(_) => ok = false,
                        },
                        b"PostTypeId" => row.post_type_id = value.parse().ok(),
                        b"ParentId" => row.parent_id = value.parse().ok(),
                        b"Title" => row.title = Some(value),
                        b"Body" => row.body = Some(value),
                        b"Tags" => row.tags = Some(Tags::Packed(value)),
                        b"Score" => row.score = value.parse().ok(),
                        _ => {}
                    }
                }
                if ok {
                    rows.push(row);
                } else {
                    bad += 1;
                }
            }
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => return Err(FormatError::Xml(e.to_string())),
        }
    }
    Ok((rows, bad))
}

fn join(rows: Vec<Row>, mut skipped: usize) -> Ingested {
    let mut questions: BTreeMap<u64, ForumPost> = BTreeMap::new();
    let mut answers = Vec::new();
    for r in rows {
        let Some(id) = r.id else {
            skipped += 1;
            continue;
        };
        match r.post_type_id {
            Some(1) => {
                let post = ForumPost {
                    post_id: id,
                    title: r.title.unwrap_or_default(),
                    question_body: r.body.unwrap_or_default(),
                    answers: Vec::new(),
                    tags: r.tags.map(Tags::into_vec).unwrap_or_default(),
                    votes: r.score.unwrap_or(0),
                };
                if questions.insert(id, post).is_some() {
                    skipped += 1;
                }
            }
            Some(2) => answers.push((id, r)),
            // wiki excerpts, tag descriptions and other row types
            Some(_) => {}
            None => skipped += 1,
        }
    }
    for (id, r) in answers {
        match r.parent_id.and_then(|p| questions.get_mut(&p)) {
            Some(q) => q.answers.push(Answer {
                answer_id: id,
                body: r.body.unwrap_or_default(),
                votes: r.score.unwrap_or(0),
            }),
            None => skipped += 1,
        }
    }
    let mut posts: Vec<ForumPost> = questions.into_values().collect();
    for p in &mut posts {
        p.answers.sort_by_key(|a| a.answer_id);
    }
    Ingested { posts, skipped }
}
