use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Zipf};

use super::metrics::GroundTruth;
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::model::{Attribute, AttributeObject, SocialNetwork, UserRecord};

const LEXICON_SEED: u64 = 0x6e61_6d65_7321;
const LEXICON_SIZE: usize = 2000;
/// Name parts are drawn with Zipf frequencies so that common names recur.
const NAME_ZIPF_EXPONENT: f64 = 1.0;
/// Total norm of the Gaussian perturbation applied to image features.
const FEATURE_NOISE: f64 = 0.1;

const ONSETS: [&str; 20] = [
    "b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "ch", "sh",
];
const VOWELS: [&str; 8] = ["a", "e", "i", "o", "u", "ai", "ei", "ou"];
const CODAS: [&str; 6] = ["", "", "n", "r", "s", "l"];

/// First and last names built from random syllables under a fixed seed.
#[derive(Clone, Debug)]
pub struct NameLexicon {
    pub first: Vec<String>,
    pub last: Vec<String>,
}

impl NameLexicon {
    pub fn generate() -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(LEXICON_SEED);
        let first = Self::unique_words(&mut rng, 2..=3);
        let last = Self::unique_words(&mut rng, 1..=3);
        NameLexicon { first, last }
    }

    /// Draws `(first, last)`; lower lexicon positions are more common.
    pub fn sample(&self, rng: &mut impl Rng) -> (&str, &str) {
        let first = pick_zipf(&self.first, rng);
        let last = pick_zipf(&self.last, rng);
        (first, last)
    }

    fn unique_words(rng: &mut ChaCha8Rng, syllables: std::ops::RangeInclusive<usize>) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut words = Vec::with_capacity(LEXICON_SIZE);
        while words.len() < LEXICON_SIZE {
            let count = rng.random_range(syllables.clone());
            let mut w = String::new();
            for _ in 0..count {
                w.push_str(ONSETS.choose(rng).unwrap());
                w.push_str(VOWELS.choose(rng).unwrap());
                w.push_str(CODAS.choose(rng).unwrap());
            }
            if seen.insert(w.clone()) {
                let mut chars = w.chars();
                let head = chars.next().unwrap().to_ascii_uppercase();
                words.push(std::iter::once(head).chain(chars).collect());
            }
        }
        words
    }
}

fn pick_zipf<'a>(words: &'a [String], rng: &mut impl Rng) -> &'a str {
    let zipf = Zipf::new(words.len() as f64, NAME_ZIPF_EXPONENT).expect("valid zipf parameters");
    let rank: f64 = zipf.sample(rng);
    words[rank as usize - 1].as_str()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_users: usize,
    /// Probability of each directed edge in the latent graph.
    pub edge_prob: f64,
    /// Probability that a latent edge is kept in each view.
    pub overlap_frac: f64,
    /// Probability that a name attribute is perturbed in a view.
    pub name_noise: f64,
    /// Image feature dimension; 0 omits the image attribute.
    pub feature_dim: usize,
    pub seed: u64,
}

impl SynthConfig {
    /// Edge probability giving the requested mean out-degree.
    pub fn with_mean_degree(n_users: usize, degree: f64) -> f64 {
        if n_users < 2 {
            0.0
        } else {
            (degree / (n_users - 1) as f64).min(1.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
            }
        };
        if self.n_users == 0 {
            return Err(Error::Config("n_users must be positive".into()));
        }
        unit("edge_prob", self.edge_prob)?;
        unit("overlap_frac", self.overlap_frac)?;
        unit("name_noise", self.name_noise)
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 200,
            edge_prob: Self::with_mean_degree(200, 8.0),
            overlap_frac: 0.8,
            name_noise: 0.3,
            feature_dim: 32,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticPair {
    pub source: SocialNetwork,
    pub target: SocialNetwork,
    pub truth: GroundTruth,
}

struct Latent {
    first: String,
    last: String,
    features: Vec<f64>,
}

/// Two noisy views of one latent population. Both views use ids `u<i>`, so
/// the ground truth is the identity alignment.
pub fn generate_synthetic_pair(cfg: &SynthConfig) -> Result<SyntheticPair> {
    cfg.validate()?;
    let lexicon = NameLexicon::generate();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_users;

    let latent: Vec<Latent> = (0..n)
        .map(|_| {
            let (first, last) = lexicon.sample(&mut rng);
            Latent {
                first: first.to_string(),
                last: last.to_string(),
                features: unit_gaussian(cfg.feature_dim, &mut rng),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(cfg.edge_prob) {
                edges.push((i, j));
            }
        }
    }

    let mut views = Vec::with_capacity(2);
    let mut perturbed = 0usize;
    for view_id in ["source", "target"] {
        let mut users = Vec::with_capacity(n);
        for (i, person) in latent.iter().enumerate() {
            let screen = format!("{} {}", person.first, person.last);
            let handle = format!("{}{}", person.first, person.last).to_lowercase();
            let mut user = UserRecord::new(format!("u{i}"));
            for (attribute, name) in [(Attribute::Username, handle), (Attribute::ScreenName, screen)] {
                let name = if rng.random_bool(cfg.name_noise) {
                    perturbed += 1;
                    perturb_name(&name, &mut rng)
                } else {
                    name
                };
                user = user.with_text(attribute, name);
            }
            if cfg.feature_dim > 0 {
                let sigma = FEATURE_NOISE / (cfg.feature_dim as f64).sqrt();
                let mut v: Vec<f64> = person
                    .features
                    .iter()
                    .map(|x| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        x + sigma * z
                    })
                    .collect();
                normalize(&mut v);
                user = user.with(Attribute::Image, AttributeObject::Vector(v));
            }
            users.push(user);
        }
        let kept = edges
            .iter()
            .filter(|_| rng.random_bool(cfg.overlap_frac))
            .map(|&(a, b)| (format!("u{a}"), format!("u{b}")))
            .collect();
        views.push((view_id, users, kept));
    }

    if perturbed == 0 && cfg.name_noise > 0.0 {
        let user = &mut views[0].1[0];
        let name = user.attribute(Attribute::ScreenName).and_then(|a| a.as_text()).unwrap().to_string();
        let changed = perturb_name(&name, &mut rng);
        user.attributes.insert(Attribute::ScreenName, AttributeObject::Text(changed));
    }

    let mut built = views
        .into_iter()
        .map(|(id, users, kept)| SocialNetwork::new(id, users, kept));
    let source = built.next().unwrap()?;
    let target = built.next().unwrap()?;
    let truth = GroundTruth::new((0..n).map(|i| (format!("u{i}"), format!("u{i}"))).collect())?;
    Ok(SyntheticPair { source, target, truth })
}

fn unit_gaussian(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if dim == 0 || norm(&v) > 1e-9 {
            normalize(&mut v);
            return v;
        }
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Drops a token, truncates a token, or swaps two adjacent characters.
/// The result always differs from `name` and is never empty.
pub(crate) fn perturb_name(name: &str, rng: &mut impl Rng) -> String {
    let tokens: Vec<&str> = name.split_whitespace().collect();
    for _ in 0..16 {
        let out = match rng.random_range(0..3) {
            0 if tokens.len() >= 2 => {
                let drop = rng.random_range(0..tokens.len());
                tokens
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, t)| *t)
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            1 => {
                let k = rng.random_range(0..tokens.len());
                let chars: Vec<char> = tokens[k].chars().collect();
                if chars.len() < 2 {
                    continue;
                }
                let keep = rng.random_range(1..chars.len());
                let cut: String = chars[..keep].iter().collect();
                let mut t = tokens.clone();
                t[k] = &cut;
                t.join(" ")
            }
            2 => {
                let mut chars: Vec<char> = name.chars().collect();
                if chars.len() < 2 {
                    continue;
                }
                let p = rng.random_range(0..chars.len() - 1);
                chars.swap(p, p + 1);
                chars.into_iter().collect()
            }
            _ => continue,
        };
        if out != name && !out.trim().is_empty() && out.trim() == out {
            return out;
        }
    }
    format!("{name}x")
}
