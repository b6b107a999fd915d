//! Offline generator: weighted variants of a few fixed heuristic forms per
//! domain, with weights drawn from a seeded stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Candidate, EvolutionType, GeneratorError, GeneratorPort, Proposal};
use crate::domains::DomainId;

const CUBE_FORMS: [&str; 4] = [
    "{a} * (6 - count(f in faces(state), uniform(f)))",
    "{a} * sum(map(f in faces(state), len(filter(x in f, x != at(f, 0)))))",
    "{a} * (6 - count(f in faces(state), uniform(f))) + {c} * sum(map(f in faces(state), len(filter(x in f, x != at(f, 0)))))",
    "max(map(f in faces(state), if uniform(f) then 0 else {a}))",
];

const G24_FORMS: [&str; 4] = [
    "{a} * min(map(v in results(state), abs(target - v)))",
    "{c} * (len(state) - 1) + {a} * min(map(v in results(state), abs(target - v)))",
    "{a} * abs(target - sum(state))",
    "if min(map(v in results(state), abs(target - v))) == 0 then 0 else {a} + {c} * len(state)",
];

const BW_FORMS: [&str; 4] = [
    "{a} * count(r in state, count(g in goal, block(g) == block(r) and support(g) != support(r)) > 0)",
    "sum(map(r in state, sum(map(g in filter(g in goal, block(g) == block(r)), \
     if support(g) != support(r) then {a} + {c} * abs(height(r) - height(g)) else 0))))",
    "{a} * len(filter(r in state, height(r) > 0)) + {c} * len(goal)",
    "{a} * sum(map(g in goal, height(g)))",
];

fn forms(domain: DomainId) -> &'static [&'static str; 4] {
    match domain {
        DomainId::Cube2x2 => &CUBE_FORMS,
        DomainId::Game24 => &G24_FORMS,
        DomainId::Blocksworld => &BW_FORMS,
    }
}

/// Deterministic [`GeneratorPort`]. Descriptions encode the form and
/// weights so later calls can recover them from existing candidates.
#[derive(Debug, Clone)]
pub struct StubGenerator {
    rng: ChaCha8Rng,
}

impl StubGenerator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn weight(&mut self) -> f64 {
        // two decimals keeps sources short and stable
        (self.rng.random_range(50..=300) as f64) / 100.0
    }

    fn render(domain: DomainId, form: usize, a: f64, c: f64) -> Proposal {
        let source = forms(domain)[form].replace("{a}", &fmt_weight(a)).replace("{c}", &fmt_weight(c));
        Proposal { description: format!("stub form {form} with weights a={} c={}", fmt_weight(a), fmt_weight(c)), source }
    }

    fn fresh(&mut self, domain: DomainId, form: usize) -> Proposal {
        let (a, c) = (self.weight(), self.weight());
        Self::render(domain, form, a, c)
    }
}

fn fmt_weight(w: f64) -> String {
    format!("{}", (w * 100.0).round() / 100.0)
}

/// Recovers (form, a, c) from a stub description.
fn decode(c: &Candidate) -> Option<(usize, f64, f64)> {
    let rest = c.description.strip_prefix("stub form ")?;
    let (form, rest) = rest.split_once(" with weights a=")?;
    let (a, cw) = rest.split_once(" c=")?;
    Some((form.parse().ok()?, a.parse().ok()?, cw.parse().ok()?))
}

impl GeneratorPort for StubGenerator {
    fn propose(&mut self, domain: DomainId, n: usize) -> Result<Vec<Proposal>, GeneratorError> {
        Ok((0..n)
            .map(|_| {
                let form = self.rng.random_range(0..4);
                self.fresh(domain, form)
            })
            .collect())
    }

    fn explore(
        &mut self,
        domain: DomainId,
        existing: &[Candidate],
        kind: EvolutionType,
        n: usize,
    ) -> Result<Vec<Proposal>, GeneratorError> {
        let known: Vec<(usize, f64, f64)> = existing.iter().filter_map(decode).collect();
        Ok((0..n)
            .map(|i| {
                let form = match kind {
                    // a form nobody in the population uses, when one exists
                    EvolutionType::NewForm => {
                        let unused: Vec<usize> = (0..4).filter(|f| known.iter().all(|k| k.0 != *f)).collect();
                        if unused.is_empty() {
                            self.rng.random_range(0..4)
                        } else {
                            unused[i % unused.len()]
                        }
                    }
                    _ if known.is_empty() => self.rng.random_range(0..4),
                    _ => known[i % known.len()].0,
                };
                self.fresh(domain, form)
            })
            .collect())
    }

    fn modify(
        &mut self,
        domain: DomainId,
        existing: &[Candidate],
        kind: EvolutionType,
        n: usize,
    ) -> Result<Vec<Proposal>, GeneratorError> {
        let known: Vec<(usize, f64, f64)> = existing.iter().filter_map(decode).collect();
        if known.is_empty() {
            return self.propose(domain, n);
        }
        Ok((0..n)
            .map(|i| {
                let (form, a, c) = known[i % known.len()];
                let (a, c) = match kind {
                    EvolutionType::Reparameterized => {
                        if self.rng.random_bool(0.5) {
                            (self.weight(), c)
                        } else {
                            (a, self.weight())
                        }
                    }
                    _ => {
                        let ja = self.rng.random_range(0.8..1.25);
                        let jc = self.rng.random_range(0.8..1.25);
                        ((a * ja).max(0.01), (c * jc).max(0.01))
                    }
                };
                Self::render(domain, form, a, c)
            })
            .collect())
    }

    fn repair(&mut self, domain: DomainId, _failed: &Proposal, _diagnostic: &str) -> Result<Proposal, GeneratorError> {
        Ok(Self::render(domain, 0, 1.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::parse;

    #[test]
    fn every_form_parses_in_its_domain() {
        for domain in DomainId::ALL {
            for form in 0..4 {
                let p = StubGenerator::render(domain, form, 1.25, 0.5);
                parse(&p.source, domain).unwrap_or_else(|e| panic!("{domain} form {form}: {e}"));
            }
        }
    }

    #[test]
    fn same_seed_same_proposals() {
        let a = StubGenerator::new(5).propose(DomainId::Game24, 6).unwrap();
        let b = StubGenerator::new(5).propose(DomainId::Game24, 6).unwrap();
        assert_eq!(a, b);
    }
}
