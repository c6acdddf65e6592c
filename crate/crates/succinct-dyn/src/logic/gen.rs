//! Seeded generator of closed formulas for property tests and corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Formula;

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    points: Vec<String>,
    sets: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn atom(&mut self) -> Formula {
        let pick = |rng: &mut R, vs: &[String]| vs[rng.gen_range(0..vs.len())].clone();
        let x = pick(self.rng, &self.points);
        match self.rng.gen_range(0..if self.sets.is_empty() { 2 } else { 3 }) {
            0 => Formula::Edge(x, pick(self.rng, &self.points)),
            1 => Formula::Eq(x, pick(self.rng, &self.points)),
            _ => Formula::In(x, pick(self.rng, &self.sets)),
        }
    }

    /// `rank` is the remaining quantifier budget, `size` a soft bound on connectives.
    fn formula(&mut self, rank: usize, size: usize) -> Formula {
        let can_atom = !self.points.is_empty();
        // A set quantifier needs a point quantifier below it unless a point is in scope.
        let can_set = rank >= 2 || (rank == 1 && can_atom);
        let choice = if !can_atom {
            if can_set && self.rng.gen_bool(0.3) { 1 } else { 0 }
        } else if rank == 0 || size == 0 {
            if size > 0 && self.rng.gen_bool(0.3) { 2 } else { 3 }
        } else {
            match self.rng.gen_range(0..10) {
                0..=3 => 0,
                4 if can_set => 1,
                4..=6 => 2,
                _ => 3,
            }
        };
        match choice {
            0 => {
                let v = format!("x{}", self.points.len());
                self.points.push(v.clone());
                let body = self.formula(rank - 1, size);
                self.points.pop();
                if self.rng.gen_bool(0.5) { Formula::exists(&v, body) } else { Formula::forall(&v, body) }
            }
            1 => {
                let v = format!("X{}", self.sets.len());
                self.sets.push(v.clone());
                let body = self.formula(rank - 1, size);
                self.sets.pop();
                if self.rng.gen_bool(0.5) { Formula::exists_set(&v, body) } else { Formula::forall_set(&v, body) }
            }
            2 => {
                let half = size / 2;
                match self.rng.gen_range(0..4) {
                    0 => self.formula(rank, size - 1).not(),
                    1 => self.formula(rank, half).and(self.formula(rank, half)),
                    2 => self.formula(rank, half).or(self.formula(rank, half)),
                    _ => self.formula(rank, half).implies(self.formula(rank, half)),
                }
            }
            _ => self.atom(),
        }
    }
}

/// Closed formula of quantifier rank at most `max_rank` (at least 1 when `max_rank ≥ 1`).
pub fn random_formula<R: Rng>(rng: &mut R, max_rank: usize) -> Formula {
    let mut g = Gen { rng, points: Vec::new(), sets: Vec::new() };
    g.formula(max_rank.max(1), 6)
}

/// `count` formulas from a ChaCha8 stream seeded with `seed`.
pub fn random_corpus(seed: u64, count: usize, max_rank: usize) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_formula(&mut rng, max_rank)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::rank;
    use super::*;

    #[test]
    fn corpus_is_closed_and_rank_bounded() {
        let corpus = random_corpus(1, 500, 2);
        for f in &corpus {
            let r = rank(f).unwrap();
            assert!((1..=2).contains(&r), "{f}");
        }
        assert!(corpus.iter().any(|f| !f.is_first_order()));
        assert_eq!(random_corpus(1, 20, 2), corpus[..20].to_vec());
    }
}
