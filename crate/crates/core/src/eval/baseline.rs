use rayon::prelude::*;

use super::ranking::RankingResult;
use crate::model::{Attribute, SocialNetwork};
use crate::similarity::jaro_winkler;

/// Ranks every target account for every source account by Jaro-Winkler
/// similarity of the lowercased `attribute` text. Accounts without the
/// attribute score 0 against everything.
pub fn name_baseline(source: &SocialNetwork, target: &SocialNetwork, attribute: Attribute) -> Vec<RankingResult> {
    let name_of = |net: &SocialNetwork| -> Vec<(String, Option<String>)> {
        net.users
            .iter()
            .map(|u| {
                let name = u.attribute(attribute).and_then(|a| a.as_text()).map(str::to_lowercase);
                (u.local_id.clone(), name)
            })
            .collect()
    };
    let targets = name_of(target);
    name_of(source)
        .into_par_iter()
        .map(|(sid, sname)| {
            let scores = targets
                .iter()
                .map(|(tid, tname)| {
                    let s = match (&sname, tname) {
                        (Some(a), Some(b)) => jaro_winkler(a, b),
                        _ => 0.0,
                    };
                    (tid.clone(), s)
                })
                .collect();
            RankingResult::from_scores(sid, scores)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;

    #[test]
    fn toy_names() {
        let (src, tgt) = toy::two_network_example();
        let r = name_baseline(&src, &tgt, toy::NAME);
        assert_eq!(r.len(), 5);
        assert_eq!(r[0].source_id, "1");
        assert_eq!(r[0].top(), Some("6"));
        assert_eq!(r[0].candidates[0].1, 1.0);
    }

    #[test]
    fn missing_attribute_scores_zero() {
        let (src, tgt) = toy::two_network_example();
        let r = name_baseline(&src, &tgt, Attribute::Image);
        assert!(r.iter().all(|x| x.candidates.iter().all(|c| c.1 == 0.0)));
        // ties fall back to ascending id
        assert_eq!(r[0].top(), Some("6"));
    }
}
