//! Top-k bagged RSSI tracking with differential distance updates.
//!
//! Each interval collects a bag of readings per node, keeps the k strongest,
//! and averages them into a processed reading. The distance to each node is
//! advanced by the differential of the inverted path-loss model between the
//! current and previous processed readings, then the position follows by
//! trilateration on the tracked distances.

use crate::channel::ChannelModel;
use crate::geom::{NodeLayout, Position, Workspace};

use super::trilateration::trilaterate_distances;
use super::BaselineError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrssiUpdate {
    pub position: Position,
    /// Bags that held fewer than k readings and were averaged in full.
    pub short_bags: usize,
    pub converged: bool,
}

/// Stateful tracker; one instance per trial.
#[derive(Debug, Clone)]
pub struct IrssiLocalizer {
    model: ChannelModel,
    top_k: usize,
    workspace: Option<Workspace>,
    anchors: Vec<Position>,
    prev_processed: Vec<f64>,
    distances: Vec<f64>,
    position: Position,
    initialized: bool,
}

impl IrssiLocalizer {
    pub fn new(
        layout: &NodeLayout,
        model: ChannelModel,
        top_k: usize,
        workspace: Option<Workspace>,
    ) -> Result<Self, BaselineError> {
        if top_k == 0 {
            return Err(BaselineError::InvalidTopK);
        }
        Ok(Self {
            model,
            top_k,
            workspace,
            anchors: layout.positions().collect(),
            prev_processed: vec![0.0; layout.len()],
            distances: vec![0.0; layout.len()],
            // Conventional starting point before any measurement arrives.
            position: Position::new(0.0, 0.0),
            initialized: false,
        })
    }

    /// Averages the k strongest readings of `bag`; short bags use everything
    /// they have and are flagged by the caller.
    fn process_bag(&self, bag: &[f64]) -> f64 {
        let mut sorted = bag.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let k = self.top_k.min(sorted.len());
        sorted[..k].iter().sum::<f64>() / k as f64
    }

    /// One interval update from per-node reading bags (layout node order).
    pub fn step(&mut self, bags: &[Vec<f64>]) -> Result<IrssiUpdate, BaselineError> {
        if bags.len() != self.anchors.len() {
            return Err(BaselineError::MismatchedBags {
                layout: self.anchors.len(),
                got: bags.len(),
            });
        }
        let mut short_bags = 0;
        let mut processed = Vec::with_capacity(bags.len());
        for (i, bag) in bags.iter().enumerate() {
            if bag.is_empty() {
                return Err(BaselineError::EmptyBag(i));
            }
            if bag.len() < self.top_k {
                short_bags += 1;
            }
            processed.push(self.process_bag(bag));
        }

        if !self.initialized {
            // First interval: seed the tracked distances from the absolute
            // inversion; afterwards only differentials are applied.
            for (d, &r) in self.distances.iter_mut().zip(&processed) {
                *d = self.model.distance_from_rssi(r);
            }
            self.initialized = true;
        } else {
            for ((d, &now), &before) in
                self.distances.iter_mut().zip(&processed).zip(&self.prev_processed)
            {
                let delta = self.model.distance_from_rssi(now)
                    - self.model.distance_from_rssi(before);
                *d = (*d + delta).max(0.0);
            }
        }
        self.prev_processed = processed;

        let result = trilaterate_distances(
            &self.anchors,
            &self.distances,
            self.position,
            self.workspace.as_ref(),
        )?;
        self.position = result.position;
        Ok(IrssiUpdate { position: result.position, short_bags, converged: result.converged })
    }
}
