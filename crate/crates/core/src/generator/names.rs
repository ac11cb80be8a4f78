//! Name pools and surface variants.

use alloc::format;
use alloc::string::String;
use rand::seq::SliceRandom;
use rand::Rng;

pub(crate) const FIRST: &[&str] = &[
    "John", "Robert", "Michael", "William", "David", "Richard", "Thomas", "Daniel", "Mark", "Paul", "Andrew",
    "Peter", "Stefan", "Jürgen", "Marcel", "Florian", "Oliver", "Anna", "Maria", "Laura", "Sarah", "Emily",
    "Julia", "Sophie", "Chen", "Wei", "Li", "Yan", "Hui", "Jun", "Hiroshi", "Yuki", "Kenji", "Akira", "Pierre",
    "Jean", "Luc", "Claire", "Élodie", "Giulia", "Marco", "Luca", "Francesca", "Carlos", "José", "Ana", "Lucía",
    "Ivan", "Olga", "Dmitri", "Łukasz", "Zoë", "Ahmed", "Fatima", "Omar", "Priya", "Rahul", "Anil", "Sunita",
    "Kwame", "Amara", "Nils", "Ingrid", "Sven", "Astrid",
];

pub(crate) const LAST: &[&str] = &[
    "Doe", "Smith", "Johnson", "Brown", "Miller", "Wilson", "Moore", "Taylor", "Anderson", "Martin", "Müller",
    "Schmidt", "Schneider", "Fischer", "Weber", "Meyer", "Wagner", "Becker", "Hoffmann", "Ackermann", "Reitz",
    "Wang", "Li", "Zhang", "Liu", "Chen", "Yang", "Huang", "Zhao", "Wu", "Zhou", "Sato", "Suzuki", "Takahashi",
    "Tanaka", "Watanabe", "Dubois", "Laurent", "Lefèvre", "Rossi", "Russo", "Ferrari", "Esposito", "García",
    "Fernández", "López", "Martínez", "Ivanov", "Petrov", "Kowalski", "Nowak", "Khan", "Ali", "Hassan", "Sharma",
    "Patel", "Gupta", "Singh", "Mensah", "Okafor", "Larsen", "Nielsen", "Johansson", "McDonald", "DeLuca",
    "MacLeod", "O'Brien", "van Dijk", "de Vries", "von Berg",
];

const NICKNAMES: &[(&str, &str)] = &[
    ("Robert", "Bob"),
    ("William", "Bill"),
    ("Richard", "Dick"),
    ("Michael", "Mike"),
    ("Daniel", "Dan"),
    ("Andrew", "Andy"),
    ("Thomas", "Tom"),
    ("David", "Dave"),
    ("Peter", "Pete"),
    ("Jürgen", "Juergen"),
    ("Élodie", "Elodie"),
    ("Łukasz", "Lukasz"),
];

pub(crate) const TITLE_WORDS: &[&str] = &[
    "adaptive", "analysis", "approach", "automatic", "bayesian", "clustering", "collaborative", "compact",
    "data", "databases", "detection", "digital", "disambiguation", "distributed", "dynamic", "efficient",
    "entity", "evaluation", "framework", "graphs", "historical", "indexing", "inference", "large-scale",
    "learning", "libraries", "linkage", "metadata", "methods", "mining", "models", "names", "navigation",
    "networks", "online", "optimal", "parallel", "queries", "records", "resolution", "robust", "scalable",
    "search", "semantic", "streams", "structures", "systems", "temporal", "towards", "ultrasonic", "web",
];

const VENUE_KINDS: &[&str] = &["Journal of", "Proceedings of", "Transactions on", "Workshop on", "Symposium on"];
const VENUE_TOPICS: &[&str] = &[
    "Digital Libraries", "Data Engineering", "Information Retrieval", "Knowledge Discovery", "Databases",
    "Web Science", "Machine Learning", "Data Quality", "Scholarly Communication", "Information Systems",
];

/// A synthetic person's true name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PersonName {
    pub first: &'static str,
    pub middle: Option<char>,
    pub last: &'static str,
}

impl PersonName {
    pub fn random<R: Rng>(rng: &mut R, middle_prob: f64) -> Self {
        let first = FIRST.choose(rng).copied().unwrap_or("John");
        let last = LAST.choose(rng).copied().unwrap_or("Doe");
        let middle = rng.gen_bool(middle_prob).then(|| (b'A' + rng.gen_range(0..26u8)) as char);
        PersonName { first, middle, last }
    }

    pub fn display(&self) -> String {
        match self.middle {
            Some(m) => format!("{} {}. {}", self.first, m, self.last),
            None => format!("{} {}", self.first, self.last),
        }
    }

    fn initial(&self) -> char {
        self.first.chars().next().unwrap_or('X')
    }

    fn abbreviated(&self) -> String {
        match self.middle {
            Some(m) => format!("{}. {}. {}", self.initial(), m, self.last),
            None => format!("{}. {}", self.initial(), self.last),
        }
    }

    /// A plausible alternative spelling under which the same person might
    /// have been filed separately. Never equal to [`display`](Self::display).
    pub fn variant<R: Rng>(&self, rng: &mut R, abbreviation_prob: f64) -> String {
        let display = self.display();
        let v = if rng.gen_bool(abbreviation_prob) {
            self.abbreviated()
        } else {
            match rng.gen_range(0..4) {
                0 => match self.middle {
                    Some(_) => format!("{} {}", self.first, self.last),
                    None => format!("{} {}. {}", self.first, (b'A' + rng.gen_range(0..26u8)) as char, self.last),
                },
                1 => match NICKNAMES.iter().find(|(full, _)| *full == self.first) {
                    Some((_, nick)) => format!("{} {}", nick, self.last),
                    None => format!("{}. {}", self.initial(), self.last),
                },
                2 => {
                    let other = LAST.choose(rng).copied().unwrap_or("Smith");
                    format!("{} {}-{}", self.first, self.last, other)
                }
                _ => {
                    let recased = recase(self.last);
                    format!("{} {}", self.first, recased)
                }
            }
        };
        if v == display {
            format!("{}. {}", self.initial(), self.last)
        } else {
            v
        }
    }
}

/// "DeLuca" → "Deluca", "Doe" → "DOE".
fn recase(last: &str) -> String {
    let mut chars = last.chars();
    let first: String = chars.next().into_iter().collect();
    let rest: String = chars.collect();
    if rest.chars().any(char::is_uppercase) {
        format!("{}{}", first, rest.to_lowercase())
    } else {
        last.to_uppercase()
    }
}

pub(crate) fn title<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(3..8);
    let mut t = String::new();
    for i in 0..n {
        let w = TITLE_WORDS.choose(rng).copied().unwrap_or("data");
        if i == 0 {
            let mut c = w.chars();
            if let Some(f) = c.next() {
                t.extend(f.to_uppercase());
                t.push_str(c.as_str());
            }
        } else {
            t.push(' ');
            t.push_str(w);
        }
    }
    t.push('.');
    t
}

pub(crate) fn venue_name<R: Rng>(rng: &mut R) -> String {
    format!(
        "{} {}",
        VENUE_KINDS.choose(rng).copied().unwrap_or("Journal of"),
        VENUE_TOPICS.choose(rng).copied().unwrap_or("Data")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn variants_differ_from_display() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let p = PersonName::random(&mut rng, 0.3);
            let v = p.variant(&mut rng, 0.5);
            assert_ne!(v, p.display());
            assert!(!v.trim().is_empty());
        }
    }

    #[test]
    fn recase_examples() {
        assert_eq!(recase("DeLuca"), "Deluca");
        assert_eq!(recase("Doe"), "DOE");
    }
}
