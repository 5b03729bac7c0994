//! Storage topology: servers are vertices, messages are edges.
//!
//! Server and message ids are 1-indexed. Edge `k` (in list order) is the pair
//! of servers storing message `W_k`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Path,
    Cycle,
    Generic,
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Generic => "generic",
        }
    }

    /// Smallest server count for which the family is a simple graph.
    pub fn min_servers(&self) -> usize {
        match self {
            GraphKind::Path | GraphKind::Generic => 2,
            GraphKind::Cycle => 3,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(GraphKind::Path),
            "cycle" => Ok(GraphKind::Cycle),
            "generic" => Ok(GraphKind::Generic),
            other => Err(Error::Parse(format!("unknown graph kind {other:?}"))),
        }
    }
}

/// Why a graph is not a valid replication pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    TooFewServers(usize),
    NoMessages,
    ServerOutOfRange { message: usize, server: usize },
    SelfLoop { message: usize, server: usize },
    DuplicateEdge { first: usize, second: usize },
    Disconnected { unreachable: usize },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::TooFewServers(n) => write!(f, "{n} servers, need at least 2"),
            GraphViolation::NoMessages => write!(f, "no messages"),
            GraphViolation::ServerOutOfRange { message, server } => {
                write!(f, "message {message} references unknown server {server}")
            }
            GraphViolation::SelfLoop { message, server } => {
                write!(f, "message {message} stored twice on server {server}")
            }
            GraphViolation::DuplicateEdge { first, second } => {
                write!(f, "duplicate edge: messages {first} and {second} share both servers")
            }
            GraphViolation::Disconnected { unreachable } => {
                write!(f, "disconnected: server {unreachable} unreachable from server 1")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    kind: GraphKind,
    #[serde(rename = "N")]
    servers: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Canonical path or cycle on `n` servers.
    pub fn build(kind: GraphKind, n: usize) -> Result<Self> {
        let min = kind.min_servers();
        if n < min {
            return Err(Error::TooFewServers { kind: kind.name(), min, n });
        }
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        match kind {
            GraphKind::Path => {}
            GraphKind::Cycle => edges.push((n, 1)),
            GraphKind::Generic => {
                return Err(Error::InvalidGraph("use Graph::generic for explicit edge lists".into()))
            }
        }
        Ok(Self { kind, servers: n, edges })
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::build(GraphKind::Path, n)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Self::build(GraphKind::Cycle, n)
    }

    /// An arbitrary edge list, validated.
    pub fn generic(servers: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self::unchecked(GraphKind::Generic, servers, edges);
        g.validate().map_err(|v| Error::InvalidGraph(v.to_string()))?;
        Ok(g)
    }

    /// Construct without validation, so that `validate` can be exercised.
    pub fn unchecked(kind: GraphKind, servers: usize, edges: Vec<(usize, usize)>) -> Self {
        Self { kind, servers, edges }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    /// `N`.
    pub fn server_count(&self) -> usize {
        self.servers
    }

    /// `K`.
    pub fn message_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The two servers storing message `k`.
    pub fn servers_of(&self, k: usize) -> (usize, usize) {
        self.edges[k - 1]
    }

    pub fn stores(&self, server: usize, k: usize) -> bool {
        let (i, j) = self.servers_of(k);
        i == server || j == server
    }

    /// Messages stored at `server`, ascending.
    pub fn storage_of(&self, server: usize) -> Vec<usize> {
        (1..=self.message_count())
            .filter(|&k| self.stores(server, k))
            .collect()
    }

    /// Check simplicity, connectivity and two-way replication. Reports the first violation.
    pub fn validate(&self) -> Result<(), GraphViolation> {
        if self.servers < 2 {
            return Err(GraphViolation::TooFewServers(self.servers));
        }
        if self.edges.is_empty() {
            return Err(GraphViolation::NoMessages);
        }
        let mut seen = std::collections::BTreeMap::new();
        for (idx, &(i, j)) in self.edges.iter().enumerate() {
            let message = idx + 1;
            for s in [i, j] {
                if s == 0 || s > self.servers {
                    return Err(GraphViolation::ServerOutOfRange { message, server: s });
                }
            }
            if i == j {
                return Err(GraphViolation::SelfLoop { message, server: i });
            }
            let key = (i.min(j), i.max(j));
            if let Some(&first) = seen.get(&key) {
                return Err(GraphViolation::DuplicateEdge { first, second: message });
            }
            seen.insert(key, message);
        }
        let mut reached = BTreeSet::from([1usize]);
        let mut frontier = vec![1usize];
        while let Some(v) = frontier.pop() {
            for &(i, j) in &self.edges {
                let other = if i == v {
                    j
                } else if j == v {
                    i
                } else {
                    continue;
                };
                if reached.insert(other) {
                    frontier.push(other);
                }
            }
        }
        if let Some(unreachable) = (1..=self.servers).find(|s| !reached.contains(s)) {
            return Err(GraphViolation::Disconnected { unreachable });
        }
        Ok(())
    }

    /// Short name used in reports, e.g. `P3` or `C5`.
    pub fn label(&self) -> String {
        match self.kind {
            GraphKind::Path => format!("P{}", self.servers),
            GraphKind::Cycle => format!("C{}", self.servers),
            GraphKind::Generic => format!("G{}x{}", self.servers, self.edges.len()),
        }
    }
}
