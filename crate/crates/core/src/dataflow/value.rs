use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Literal, NodeId, TurtlePath};

/// Largest number of alternatives a merged value may hold before it
/// degrades to `Unknown`.
pub const UNION_CAP: usize = 8;

pub(crate) type FuncId = usize;
pub(crate) type ClassId = usize;

/// An abstract object standing in for whatever an API call returned.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TurtleValue {
    pub origin: NodeId,
    pub path: TurtlePath,
    /// Fields read in call-target position that have not materialized a
    /// node yet (`pd.read_csv` before the call happens).
    pub pending_fields: Vec<String>,
    /// Set when the object is an instance of a class defined in the file.
    pub(crate) local_class: Option<ClassId>,
}

impl TurtleValue {
    pub fn new(origin: NodeId, path: TurtlePath) -> Self {
        Self {
            origin,
            path,
            pending_fields: Vec::new(),
            local_class: None,
        }
    }

    pub fn effective_label(&self) -> TurtlePath {
        self.path.concat(&self.pending_fields)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbstractValue {
    Turtle(TurtleValue),
    /// A literal plus the byte range of the expression that produced it.
    Constant(Literal, (u32, u32)),
    /// Syntactic tuple of arity >= 2.
    Tuple(Vec<AbstractValue>),
    Function(FuncId),
    Class(ClassId),
    /// Alternatives reaching the same variable from different branches;
    /// 2..=UNION_CAP members, sorted, never nested.
    Union(Vec<AbstractValue>),
    Unknown,
}

impl AbstractValue {
    pub fn is_unknown(&self) -> bool {
        matches!(self, AbstractValue::Unknown)
    }

    /// The alternatives of this value (itself unless a union).
    pub fn members(&self) -> &[AbstractValue] {
        match self {
            AbstractValue::Union(m) => m,
            other => std::slice::from_ref(other),
        }
    }

    pub fn turtles(&self) -> impl Iterator<Item = &TurtleValue> {
        self.members().iter().filter_map(|m| match m {
            AbstractValue::Turtle(t) => Some(t),
            _ => None,
        })
    }

    /// May-merge of two values. `Unknown` alternatives are dropped unless
    /// nothing else remains.
    pub fn join(a: &AbstractValue, b: &AbstractValue) -> AbstractValue {
        if a == b {
            return a.clone();
        }
        let mut set = BTreeSet::new();
        for m in a.members().iter().chain(b.members()) {
            if !m.is_unknown() {
                set.insert(m.clone());
            }
        }
        match set.len() {
            0 => AbstractValue::Unknown,
            1 => set.into_iter().next().unwrap(),
            n if n > UNION_CAP => AbstractValue::Unknown,
            _ => AbstractValue::Union(set.into_iter().collect()),
        }
    }
}

/// Lexical environment: innermost frame last.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Environment {
    frames: Vec<Frame>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Frame {
    vars: BTreeMap<String, AbstractValue>,
    globals: BTreeSet<String>,
}

impl Environment {
    pub fn new() -> Self {
        Self {
            frames: vec![Frame::default()],
        }
    }

    pub(crate) fn with_globals(globals: BTreeMap<String, AbstractValue>) -> Self {
        Self {
            frames: vec![Frame {
                vars: globals,
                globals: BTreeSet::new(),
            }],
        }
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    pub fn push_frame(&mut self) {
        self.frames.push(Frame::default());
    }

    pub fn pop_frame(&mut self) {
        if self.frames.len() > 1 {
            self.frames.pop();
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&AbstractValue> {
        self.frames.iter().rev().find_map(|f| f.vars.get(name))
    }

    pub fn bind(&mut self, name: &str, value: AbstractValue) {
        let top = self.frames.len() - 1;
        let target = if self.frames[top].globals.contains(name) {
            0
        } else {
            top
        };
        self.frames[target].vars.insert(name.to_owned(), value);
    }

    pub(crate) fn declare_global(&mut self, name: &str) {
        if let Some(top) = self.frames.last_mut() {
            top.globals.insert(name.to_owned());
        }
    }

    pub(crate) fn outermost(&self) -> &BTreeMap<String, AbstractValue> {
        &self.frames[0].vars
    }

    /// Environment holding only the outermost (module) frame.
    pub(crate) fn module_view(&self) -> Environment {
        Environment {
            frames: vec![self.frames[0].clone()],
        }
    }

    pub(crate) fn replace_outermost(&mut self, vars: BTreeMap<String, AbstractValue>) {
        self.frames[0].vars = vars;
    }

    /// Frame-wise may-merge of two environments with the same shape.
    pub fn join(a: &Environment, b: &Environment) -> Environment {
        let frames = a
            .frames
            .iter()
            .zip(&b.frames)
            .map(|(fa, fb)| {
                let mut vars = fa.vars.clone();
                for (k, vb) in &fb.vars {
                    let merged = match vars.get(k) {
                        Some(va) => AbstractValue::join(va, vb),
                        None => vb.clone(),
                    };
                    vars.insert(k.clone(), merged);
                }
                Frame {
                    vars,
                    globals: fa.globals.union(&fb.globals).cloned().collect(),
                }
            })
            .collect();
        Environment { frames }
    }
}
