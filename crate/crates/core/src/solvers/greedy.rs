use crate::instance::Instance;
use crate::report::{Committee, Parameters, Recorder, SolveOutcome};
use crate::score::Tally;

/// Adds the candidate of largest marginal gain `min(k, |C|)` times; ties go
/// to the lowest index.
pub fn greedy(instance: &Instance) -> Committee {
    let graph = instance.graph();
    let size = instance.k().min(graph.candidate_count());
    let mut tally = Tally::new(graph, instance.family());
    let mut taken = vec![false; graph.candidate_count()];
    for _ in 0..size {
        let mut pick = None;
        let mut best = None;
        for c in (0..graph.candidate_count()).filter(|&c| !taken[c]) {
            let gain = tally.gain(c);
            if best.as_ref().is_none_or(|b| gain > *b) {
                best = Some(gain);
                pick = Some(c);
            }
        }
        let c = pick.expect("fewer members than candidates");
        taken[c] = true;
        tally.add(c);
    }
    Committee::new(instance, tally.members().to_vec(), instance.k())
}

/// [`greedy`] wrapped in a report. Never answers "no-instance".
pub fn greedy_outcome(instance: &Instance) -> SolveOutcome {
    let rec = Recorder::start("greedy", instance, Parameters::default());
    let committee = greedy(instance);
    rec.finish(instance, Some(committee))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::testkit::fixtures::e1;

    #[test]
    fn e1_picks_b_then_c() {
        let c = greedy(&e1());
        assert_eq!(c.members, vec![1, 2]);
        assert_eq!(c.score, ratio(7, 2));
    }

    #[test]
    fn full_k_takes_everything() {
        assert_eq!(greedy(&e1().with_k(3)).members, vec![0, 1, 2]);
        assert_eq!(greedy(&e1().with_k(9)).members, vec![0, 1, 2]);
    }
}
