//! Text specifications of maps.
//!
//! ```text
//! spec    := atom | "prod(" spec ("," spec)+ ")" | "compose(" spec ("," spec)+ ")"
//! atom    := "id" | "S" | "moebius:" [c ","] c | "blaschke:" c ("," c)* [";" c]
//!          | "singular:" angle "@" mass ("," angle "@" mass)* | "balpha:" c
//! c       := complex literal such as 0.5, -0.2i, 0.3+0.4i, i
//! ```
//!
//! `moebius:λ,a` takes the rotation first; `moebius:a` means `λ = 1`.
//! `blaschke:...;λ` sets the rotation. `compose(f,g,h)` is `f∘g∘h`.

use std::f64::consts::TAU;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use super::{Atom, HoloMap};
use crate::error::{LabError, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| LabError::Parse(format!("bad number `{s}`")))
}

/// Parse `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim().replace(' ', "");
    if s.is_empty() {
        return Err(LabError::Parse("empty complex literal".into()));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other)?,
    };
    Ok(Complex64::new(re, im))
}

pub(crate) fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

fn split_top_level(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(LabError::Parse(format!("unbalanced parentheses in `{s}`")));
        }
        if ch == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(LabError::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    out.push(cur);
    Ok(out)
}

/// Split combinator arguments, gluing bare numbers back onto the previous
/// argument (`prod(blaschke:0,0.5,S)` has two arguments).
fn combinator_args(body: &str) -> Result<Vec<String>> {
    let mut args: Vec<String> = Vec::new();
    for piece in split_top_level(body)? {
        let piece = piece.trim().to_string();
        let numeric = piece
            .split(';')
            .filter(|t| !t.is_empty())
            .all(|t| parse_complex(t).is_ok())
            || piece.contains('@') && !piece.contains(':');
        match args.last_mut() {
            Some(prev) if numeric || piece.starts_with(';') => {
                prev.push(',');
                prev.push_str(&piece);
            }
            _ => args.push(piece),
        }
    }
    // a trailing ";λ" glued with a comma is turned back into ";λ"
    Ok(args.into_iter().map(|a| a.replace(",;", ";")).collect())
}

fn parse_list(args: &str) -> Result<Vec<Complex64>> {
    args.split(',').map(parse_complex).collect()
}

/// Parse a map from its text specification.
pub fn parse_spec(s: &str) -> Result<HoloMap> {
    let s = s.trim();
    if let Some(open) = s.find('(') {
        let head = s[..open].trim();
        let body = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| LabError::Parse(format!("missing `)` in `{s}`")))?;
        let args = combinator_args(body)?;
        if args.len() < 2 {
            return Err(LabError::Parse(format!("`{head}` needs at least two arguments")));
        }
        let mut maps = args.iter().map(|a| parse_spec(a)).collect::<Result<Vec<_>>>()?;
        return match head {
            "prod" | "product" => {
                let first = maps.remove(0);
                Ok(maps.into_iter().fold(first, HoloMap::product))
            }
            "compose" => {
                let mut acc = maps.pop().expect("two or more arguments");
                while let Some(f) = maps.pop() {
                    acc = HoloMap::compose(f, acc)?;
                }
                Ok(acc)
            }
            other => Err(LabError::Parse(format!("unknown combinator `{other}`"))),
        };
    }
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (s, None),
    };
    match (name, args) {
        ("id" | "identity" | "z", None) => Ok(HoloMap::identity()),
        ("S", None) => Ok(HoloMap::atomic_s()),
        ("moebius", Some(a)) => {
            let v = parse_list(a)?;
            match v.as_slice() {
                [a] => HoloMap::moebius(ONE, *a),
                [lambda, a] => HoloMap::moebius(*lambda, *a),
                _ => Err(LabError::Parse(format!("moebius takes 1 or 2 parameters: `{s}`"))),
            }
        }
        ("blaschke", Some(a)) => {
            let (zeros, lambda) = match a.split_once(';') {
                Some((z, l)) => (z, parse_complex(l)?),
                None => (a, ONE),
            };
            HoloMap::blaschke(parse_list(zeros)?, lambda)
        }
        ("singular", Some(a)) => {
            let atoms = a
                .split(',')
                .map(|p| {
                    let (t, m) = p
                        .split_once('@')
                        .ok_or_else(|| LabError::Parse(format!("atom `{p}` should read angle@mass")))?;
                    Ok(Atom {
                        angle: parse_real(t)?,
                        mass: parse_real(m)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            HoloMap::singular_inner(atoms)
        }
        ("balpha", Some(a)) => HoloMap::b_alpha(parse_complex(a)?),
        _ => Err(LabError::Parse(format!("unknown function spec `{s}`"))),
    }
}

/// Parameter families for randomized search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomFamily {
    Moebius,
    Blaschke { max_zeros: usize },
    Singular,
    BAlpha,
    Product,
}

impl RandomFamily {
    pub const ALL: [RandomFamily; 5] = [
        RandomFamily::Moebius,
        RandomFamily::Blaschke { max_zeros: 8 },
        RandomFamily::Singular,
        RandomFamily::BAlpha,
        RandomFamily::Product,
    ];

    pub fn name(&self) -> String {
        match self {
            RandomFamily::Moebius => "moebius".into(),
            RandomFamily::Blaschke { max_zeros } => format!("blaschke/{max_zeros}"),
            RandomFamily::Singular => "singular".into(),
            RandomFamily::BAlpha => "balpha".into(),
            RandomFamily::Product => "product".into(),
        }
    }
}

impl FromStr for RandomFamily {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "moebius" => Ok(RandomFamily::Moebius),
            "blaschke" => Ok(RandomFamily::Blaschke { max_zeros: 4 }),
            "singular" => Ok(RandomFamily::Singular),
            "balpha" => Ok(RandomFamily::BAlpha),
            "product" | "prod" => Ok(RandomFamily::Product),
            other => match other.strip_prefix("blaschke/") {
                Some(n) => {
                    let max_zeros: usize = n
                        .parse()
                        .map_err(|_| LabError::Parse(format!("bad zero count in `{other}`")))?;
                    if max_zeros == 0 || max_zeros > super::MAX_ZEROS {
                        return Err(LabError::Parse(format!("zero count must be 1..={}", super::MAX_ZEROS)));
                    }
                    Ok(RandomFamily::Blaschke { max_zeros })
                }
                None => Err(LabError::Parse(format!("unknown random family `{other}`"))),
            },
        }
    }
}

fn unimodular<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Uniform in the annulus `r_min <= |w| <= r_max` by area.
pub fn random_in_annulus<R: Rng>(rng: &mut R, r_min: f64, r_max: f64) -> Complex64 {
    let u: f64 = rng.gen();
    let r = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..TAU))
}

/// Draw a random member of a family.
pub fn random_map<R: Rng>(family: RandomFamily, rng: &mut R) -> HoloMap {
    let built = match family {
        RandomFamily::Moebius => HoloMap::moebius(unimodular(rng), random_in_annulus(rng, 0.0, 0.95)),
        RandomFamily::Blaschke { max_zeros } => {
            let k = rng.gen_range(1..=max_zeros);
            let zeros = (0..k).map(|_| random_in_annulus(rng, 0.0, 0.95)).collect();
            HoloMap::blaschke(zeros, unimodular(rng))
        }
        RandomFamily::Singular => {
            let k = rng.gen_range(1..=3);
            let atoms = (0..k)
                .map(|_| Atom {
                    angle: rng.gen_range(0.0..TAU),
                    mass: rng.gen_range(0.1..2.0),
                })
                .collect();
            HoloMap::singular_inner(atoms)
        }
        RandomFamily::BAlpha => HoloMap::b_alpha(random_in_annulus(rng, 0.05, 0.95)),
        RandomFamily::Product => {
            let parts = [
                RandomFamily::Moebius,
                RandomFamily::Blaschke { max_zeros: 3 },
                RandomFamily::Singular,
                RandomFamily::BAlpha,
            ];
            let f = random_map(parts[rng.gen_range(0..parts.len())], rng);
            let g = random_map(parts[rng.gen_range(0..parts.len())], rng);
            Ok(HoloMap::product(f, g))
        }
    };
    built.expect("random parameters are drawn inside the domain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.3-0.4i").unwrap(), Complex64::new(0.3, -0.4));
        assert_eq!(parse_complex("-2e-3+1e-2i").unwrap(), Complex64::new(-2e-3, 1e-2));
        assert_eq!(parse_complex("0.25i").unwrap(), Complex64::new(0.0, 0.25));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn specs_parse_to_expected_families() {
        let z = Complex64::new(0.3, 0.1);
        let sq = parse_spec("blaschke:0,0").unwrap();
        assert!((sq.eval(z) - z * z).norm() < 1e-16);
        assert_eq!(
            parse_spec("moebius:1,0.5").unwrap().eval(Complex64::new(0.0, 0.0)),
            Complex64::new(-0.5, 0.0)
        );
        assert_eq!(parse_spec("S").unwrap().tag(), "singular");
        assert_eq!(parse_spec("balpha:0.5").unwrap().tag(), "quotient_blaschke");
        let p = parse_spec("prod(S,blaschke:0)").unwrap();
        assert_eq!(p.tag(), "product");
        let p2 = parse_spec("prod(blaschke:0,0.5, S)").unwrap();
        let want = z * (z - 0.5) / (1.0 - 0.5 * z) * HoloMap::atomic_s().eval(z);
        assert!((p2.eval(z) - want).norm() < 1e-15);
        let c = parse_spec("compose(moebius:0.5, S)").unwrap();
        assert!((c.eval(z) - HoloMap::b_alpha(Complex64::new(0.5, 0.0)).unwrap().eval(z)).norm() < 1e-15);
        let rot = parse_spec("blaschke:0.1,0.2;i").unwrap();
        let direct = HoloMap::blaschke(vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)], Complex64::i());
        assert_eq!(rot, direct.unwrap());
        assert!(parse_spec("singular:1.0@0.5,2.0@1").is_ok());
        assert!(parse_spec("nonsense").is_err());
        assert!(parse_spec("prod(S").is_err());
        assert!(parse_spec("balpha:0").is_err());
    }

    #[test]
    fn spec_round_trip() {
        for s in [
            "S",
            "balpha:0.5",
            "moebius:1,0.3",
            "blaschke:0,0.5",
            "prod(S,blaschke:0)",
            "singular:1@0.5",
            "prod(blaschke:0.1,0.2i;i,S)",
        ] {
            let f = parse_spec(s).unwrap();
            assert_eq!(parse_spec(&f.to_spec()).unwrap(), f, "{s}");
        }
    }

    #[test]
    fn random_families_are_valid_self_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fam in RandomFamily::ALL {
            assert_eq!(fam.name().parse::<RandomFamily>().unwrap(), fam);
            for _ in 0..50 {
                let f = random_map(fam, &mut rng);
                assert!(f.is_inner());
                let z = random_in_annulus(&mut rng, 0.0, 0.99);
                assert!(f.eval(z).norm() <= 1.0);
            }
        }
    }
}
