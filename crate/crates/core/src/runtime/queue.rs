use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::lattice::Store;

/// Order in which pending nodes are explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueueStrategy {
    /// Depth-first, left to right.
    #[default]
    StackLR,
    /// Breadth-first.
    Fifo,
}

impl FromStr for QueueStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dfs" | "stack" => Ok(QueueStrategy::StackLR),
            "bfs" | "fifo" => Ok(QueueStrategy::Fifo),
            _ => Err(format!("unknown queue `{s}` (expected dfs or bfs)")),
        }
    }
}

impl fmt::Display for QueueStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueueStrategy::StackLR => "dfs",
            QueueStrategy::Fifo => "bfs",
        })
    }
}

/// A search-tree node: the world-line values of one pending branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: u64,
    pub parent: Option<u64>,
    pub depth: u32,
    pub store: Store,
}

#[derive(Debug, Clone, Default)]
pub struct Queue {
    strategy: QueueStrategy,
    items: VecDeque<Node>,
}

impl Queue {
    pub fn new(strategy: QueueStrategy) -> Queue {
        Queue { strategy, items: VecDeque::new() }
    }

    pub fn strategy(&self) -> QueueStrategy {
        self.strategy
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Pending nodes in the order they will be popped.
    pub fn pending(&self) -> Vec<&Node> {
        match self.strategy {
            QueueStrategy::StackLR => self.items.iter().rev().collect(),
            QueueStrategy::Fifo => self.items.iter().collect(),
        }
    }

    /// Enqueues the children of one node, leftmost first.
    pub fn push(&mut self, children: Vec<Node>) {
        match self.strategy {
            QueueStrategy::StackLR => self.items.extend(children.into_iter().rev()),
            QueueStrategy::Fifo => self.items.extend(children),
        }
    }

    pub fn pop(&mut self) -> Option<Node> {
        match self.strategy {
            QueueStrategy::StackLR => self.items.pop_back(),
            QueueStrategy::Fifo => self.items.pop_front(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u64) -> Node {
        Node { id, parent: None, depth: 0, store: Store::new() }
    }

    #[test]
    fn stack_pops_leftmost_child_first() {
        let mut q = Queue::new(QueueStrategy::StackLR);
        q.push(vec![node(1), node(2)]);
        assert_eq!(q.pop().unwrap().id, 1);
        q.push(vec![node(3), node(4)]);
        assert_eq!(q.pop().unwrap().id, 3);
        assert_eq!(q.pop().unwrap().id, 4);
        assert_eq!(q.pop().unwrap().id, 2);
        assert!(q.pop().is_none());
    }

    #[test]
    fn fifo_pops_oldest_first() {
        let mut q = Queue::new(QueueStrategy::Fifo);
        q.push(vec![node(1), node(2)]);
        assert_eq!(q.pop().unwrap().id, 1);
        q.push(vec![node(3)]);
        assert_eq!(q.pop().unwrap().id, 2);
        assert_eq!(q.pop().unwrap().id, 3);
    }

    #[test]
    fn empty_push_is_identity() {
        let mut q = Queue::new(QueueStrategy::StackLR);
        q.push(vec![node(1)]);
        q.push(vec![]);
        assert_eq!(q.len(), 1);
    }
}
