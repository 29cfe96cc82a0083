//! Statement-level control flow restricted to call nodes, and the
//! `immediatelyPrecedes` relation derived from it.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::graph::NodeId;

/// The order in which calls may execute within one entry point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallTrace {
    Call(NodeId),
    Seq(Vec<CallTrace>),
    /// Exactly one arm runs.
    Branch(Vec<CallTrace>),
    /// Body runs zero or more times.
    Loop(Box<CallTrace>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Point {
    After(NodeId),
    LoopHead(usize),
}

pub(crate) struct DeadlineExceeded;

/// Edge `a -> b` iff `b` can be the next call executed after `a`. Self
/// loops are dropped.
pub fn order_calls(trace: &CallTrace) -> BTreeSet<(NodeId, NodeId)> {
    match order_calls_until(trace, None) {
        Ok(edges) => edges,
        Err(DeadlineExceeded) => unreachable!("no deadline"),
    }
}

pub(crate) fn order_calls_until(
    trace: &CallTrace,
    deadline: Option<Instant>,
) -> Result<BTreeSet<(NodeId, NodeId)>, DeadlineExceeded> {
    let mut walker = Walker {
        edges: BTreeSet::new(),
        loop_first: BTreeMap::new(),
        next_loop: 0,
        deadline,
        ticks: 0,
    };
    walker.walk(trace, BTreeSet::new())?;
    Ok(walker.edges)
}

struct Walker {
    edges: BTreeSet<(NodeId, NodeId)>,
    loop_first: BTreeMap<usize, BTreeSet<NodeId>>,
    next_loop: usize,
    deadline: Option<Instant>,
    ticks: u32,
}

impl Walker {
    fn tick(&mut self) -> Result<(), DeadlineExceeded> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(DeadlineExceeded);
                }
            }
        }
        Ok(())
    }

    fn walk(
        &mut self,
        trace: &CallTrace,
        frontier: BTreeSet<Point>,
    ) -> Result<BTreeSet<Point>, DeadlineExceeded> {
        match trace {
            CallTrace::Call(id) => {
                for p in &frontier {
                    self.tick()?;
                    match *p {
                        Point::After(prev) if prev != *id => {
                            self.edges.insert((prev, *id));
                        }
                        Point::After(_) => {}
                        Point::LoopHead(k) => {
                            self.loop_first.entry(k).or_default().insert(*id);
                        }
                    }
                }
                Ok(BTreeSet::from([Point::After(*id)]))
            }
            CallTrace::Seq(items) => {
                let mut frontier = frontier;
                for item in items {
                    frontier = self.walk(item, frontier)?;
                }
                Ok(frontier)
            }
            CallTrace::Branch(arms) => {
                if arms.is_empty() {
                    return Ok(frontier);
                }
                let mut out = BTreeSet::new();
                for arm in arms {
                    self.tick()?;
                    out.extend(self.walk(arm, frontier.clone())?);
                }
                Ok(out)
            }
            CallTrace::Loop(body) => {
                let k = self.next_loop;
                self.next_loop += 1;
                let mut entry = frontier.clone();
                entry.insert(Point::LoopHead(k));
                let out = self.walk(body, entry)?;
                let firsts = self.loop_first.remove(&k).unwrap_or_default();
                for p in &out {
                    if let Point::After(a) = *p {
                        for &b in &firsts {
                            self.tick()?;
                            if a != b {
                                self.edges.insert((a, b));
                            }
                        }
                    }
                }
                let mut result = frontier;
                result.extend(out);
                result.remove(&Point::LoopHead(k));
                Ok(result)
            }
        }
    }
}

/// Builds a [`CallTrace`] while the interpreter walks statements.
#[derive(Debug)]
pub(crate) struct TraceBuilder {
    stack: Vec<Frame>,
}

#[derive(Debug)]
enum Frame {
    Seq(Vec<CallTrace>),
    Branch(Vec<CallTrace>),
}

impl TraceBuilder {
    pub(crate) fn new() -> Self {
        Self {
            stack: vec![Frame::Seq(Vec::new())],
        }
    }

    fn current(&mut self) -> &mut Vec<CallTrace> {
        match self.stack.last_mut() {
            Some(Frame::Seq(items)) => items,
            _ => panic!("trace builder: call recorded outside a sequence"),
        }
    }

    pub(crate) fn call(&mut self, id: NodeId) {
        self.current().push(CallTrace::Call(id));
    }

    pub(crate) fn begin_branch(&mut self) {
        self.stack.push(Frame::Branch(Vec::new()));
    }

    pub(crate) fn begin_arm(&mut self) {
        self.stack.push(Frame::Seq(Vec::new()));
    }

    pub(crate) fn end_arm(&mut self) {
        let Some(Frame::Seq(items)) = self.stack.pop() else {
            panic!("trace builder: unbalanced arm");
        };
        match self.stack.last_mut() {
            Some(Frame::Branch(arms)) => arms.push(CallTrace::Seq(items)),
            _ => panic!("trace builder: arm outside branch"),
        }
    }

    pub(crate) fn end_branch(&mut self) {
        let Some(Frame::Branch(arms)) = self.stack.pop() else {
            panic!("trace builder: unbalanced branch");
        };
        self.current().push(CallTrace::Branch(arms));
    }

    pub(crate) fn begin_loop(&mut self) {
        self.stack.push(Frame::Seq(Vec::new()));
    }

    pub(crate) fn end_loop(&mut self) {
        let Some(Frame::Seq(items)) = self.stack.pop() else {
            panic!("trace builder: unbalanced loop");
        };
        self.current()
            .push(CallTrace::Loop(Box::new(CallTrace::Seq(items))));
    }

    pub(crate) fn finish(mut self) -> CallTrace {
        assert_eq!(self.stack.len(), 1, "trace builder: unclosed frames");
        match self.stack.pop() {
            Some(Frame::Seq(items)) => CallTrace::Seq(items),
            _ => unreachable!(),
        }
    }
}
