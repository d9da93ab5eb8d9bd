use smallvec::SmallVec;

use crate::{Error, Result};

/// One scheduled (beam, user) pair with its scheduling SINR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub beam: usize,
    pub user: usize,
    pub sinr: f64,
}

/// Outcome of the spatial search on one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierDecision {
    /// Size of the beam combination the search settled on.
    pub combination_size: usize,
    /// Lexicographic index of that combination among all
    /// `C(N_T, combination_size)` subsets.
    pub combination: usize,
    /// Served links in increasing beam order. Feedback-driven scheduling may
    /// leave beams of the combination idle, so `links.len()` can be smaller
    /// than `combination_size`.
    pub links: SmallVec<[Link; 4]>,
    /// Sum of (weighted) `log2(1 + sinr)` over the links.
    pub objective: f64,
}

impl SubcarrierDecision {
    /// Number of active beams, `Q_m`.
    pub fn q(&self) -> usize {
        self.links.len()
    }

    pub fn active_beams(&self) -> SmallVec<[usize; 8]> {
        self.links.iter().map(|l| l.beam).collect()
    }

    pub fn link_of_user(&self, k: usize) -> Option<&Link> {
        self.links.iter().find(|l| l.user == k)
    }

    /// Same beams, users and combination; SINRs and objectives may differ in
    /// rounding.
    pub fn same_choice(&self, other: &SubcarrierDecision) -> bool {
        self.combination_size == other.combination_size
            && self.combination == other.combination
            && self.links.len() == other.links.len()
            && self
                .links
                .iter()
                .zip(&other.links)
                .all(|(a, b)| a.beam == b.beam && a.user == b.user)
    }
}

/// Beam-to-user maps for every subcarrier of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    users: usize,
    antennas: usize,
    decisions: Vec<SubcarrierDecision>,
}

impl Assignment {
    pub fn new(users: usize, antennas: usize, decisions: Vec<SubcarrierDecision>) -> Self {
        Self {
            users,
            antennas,
            decisions,
        }
    }

    /// An assignment that schedules nobody.
    pub fn empty(users: usize, antennas: usize, subcarriers: usize) -> Self {
        let idle = SubcarrierDecision {
            combination_size: 0,
            combination: 0,
            links: SmallVec::new(),
            objective: 0.0,
        };
        Self::new(users, antennas, vec![idle; subcarriers])
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn subcarriers(&self) -> usize {
        self.decisions.len()
    }

    pub fn decision(&self, m: usize) -> &SubcarrierDecision {
        &self.decisions[m]
    }

    pub fn decisions(&self) -> &[SubcarrierDecision] {
        &self.decisions
    }

    /// The binary allocation variable `a[k, m]`.
    pub fn is_scheduled(&self, k: usize, m: usize) -> bool {
        self.decisions[m].link_of_user(k).is_some()
    }

    /// `sum_m Q_m`.
    pub fn scheduled_links(&self) -> usize {
        self.decisions.iter().map(|d| d.q()).sum()
    }

    /// `a[k, m]` as a dense `K x M` row-major 0/1 matrix.
    pub fn indicator(&self) -> Vec<u8> {
        let mut a = vec![0u8; self.users * self.decisions.len()];
        for (m, d) in self.decisions.iter().enumerate() {
            for l in &d.links {
                a[l.user * self.decisions.len() + m] = 1;
            }
        }
        a
    }

    /// Checks index ranges, beam ordering and that no user or beam repeats
    /// within a subcarrier.
    pub fn validate(&self) -> Result<()> {
        for (m, d) in self.decisions.iter().enumerate() {
            if d.q() > self.antennas || d.q() > d.combination_size {
                return Err(Error::Argument(format!("subcarrier {m}: too many links")));
            }
            let mut users = vec![false; self.users];
            let mut last_beam = None;
            for l in &d.links {
                if l.user >= self.users || l.beam >= self.antennas {
                    return Err(Error::Argument(format!("subcarrier {m}: link out of range")));
                }
                if users[l.user] {
                    return Err(Error::Argument(format!(
                        "subcarrier {m}: user {} scheduled twice",
                        l.user
                    )));
                }
                users[l.user] = true;
                if last_beam.is_some_and(|b| b >= l.beam) {
                    return Err(Error::Argument(format!(
                        "subcarrier {m}: beams not strictly increasing"
                    )));
                }
                last_beam = Some(l.beam);
            }
        }
        Ok(())
    }
}
