use num_complex::Complex64;
use serde::Serialize;

use super::CliError;
use crate::julia::{lattes_sn, lattes_weierstrass};
use crate::maps::{MoebiusMap, Polynomial, RationalMap};
use crate::newton::newton_map;

/// Grammar accepted by `--map`, shown in `--help`.
pub const MAP_GRAMMAR: &str = "\
Map specifications (coefficients highest degree first, complex literals as a+bi):
  poly: c_n ... c_0          polynomial
  rat: <poly> / <poly>       rational map P/Q
  moebius: A B C D           (Az+B)/(Cz+D)
  lattes-w: g2 g3            Lattes map of the Weierstrass duplication formula
  lattes-sn: k               Lattes map built from Jacobi sn, 0 < k < 1
  newton: <poly>             Newton map z - p/p' of the polynomial";

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Poly(Polynomial),
    Rational(Polynomial, Polynomial),
    Moebius([Complex64; 4]),
    LattesW { g2: Complex64, g3: Complex64 },
    LattesSn { k: f64 },
    Newton(Polynomial),
}

/// Serializable description of the parsed input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapDescription {
    pub spec: String,
    pub kind: &'static str,
    /// Coefficients of the numerator, lowest degree first.
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
    pub degree: usize,
}

fn parse_error(position: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        position,
        message: message.into(),
    }
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// `3`, `-2.5e-3`, `i`, `-i`, `4i`, `1+2i`, `1.5-0.5i`, `1e-3+2e-4i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(s).map(|x| Complex64::new(x, 0.0));
    };
    // split at the last sign that is not part of an exponent
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
    Some(Complex64::new(re, im))
}

/// Whitespace-separated complex literals starting at byte `offset` of the
/// full spec (for error positions).
fn parse_list(text: &str, offset: usize) -> Result<Vec<Complex64>, CliError> {
    let mut out = Vec::new();
    let mut pos = 0;
    for token in text.split_whitespace() {
        let at = text[pos..].find(token).map(|k| k + pos).unwrap_or(pos);
        pos = at + token.len();
        match parse_complex(token) {
            Some(c) => out.push(c),
            None => {
                return Err(parse_error(
                    offset + at + 1,
                    format!("'{token}' is not a complex number"),
                ))
            }
        }
    }
    Ok(out)
}

fn parse_poly(text: &str, offset: usize) -> Result<Polynomial, CliError> {
    let coeffs = parse_list(text, offset)?;
    let p = Polynomial::from_descending(&coeffs);
    if p.is_zero() {
        return Err(parse_error(offset + 1, "polynomial has no nonzero coefficient"));
    }
    Ok(p)
}

fn expect_count(values: &[Complex64], n: usize, offset: usize, what: &str) -> Result<(), CliError> {
    if values.len() != n {
        return Err(parse_error(
            offset + 1,
            format!("{what} takes {n} numbers, found {}", values.len()),
        ));
    }
    Ok(())
}

impl MapSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let colon = spec
            .find(':')
            .ok_or_else(|| parse_error(1, "expected '<kind>: ...' (see --help for the grammar)"))?;
        let kind = spec[..colon].trim();
        let body = &spec[colon + 1..];
        let offset = colon + 1;
        match kind {
            "poly" => Ok(MapSpec::Poly(parse_poly(body, offset)?)),
            "newton" => Ok(MapSpec::Newton(parse_poly(body, offset)?)),
            "rat" => {
                let slash = body
                    .find('/')
                    .ok_or_else(|| parse_error(offset + body.len() + 1, "expected '/' between numerator and denominator"))?;
                let num = parse_poly(&body[..slash], offset)?;
                let den = parse_poly(&body[slash + 1..], offset + slash + 1)?;
                Ok(MapSpec::Rational(num, den))
            }
            "moebius" => {
                let v = parse_list(body, offset)?;
                expect_count(&v, 4, offset, "moebius")?;
                Ok(MapSpec::Moebius([v[0], v[1], v[2], v[3]]))
            }
            "lattes-w" => {
                let v = parse_list(body, offset)?;
                expect_count(&v, 2, offset, "lattes-w")?;
                Ok(MapSpec::LattesW { g2: v[0], g3: v[1] })
            }
            "lattes-sn" => {
                let v = parse_list(body, offset)?;
                expect_count(&v, 1, offset, "lattes-sn")?;
                if v[0].im != 0.0 {
                    return Err(parse_error(offset + 1, "k must be real"));
                }
                Ok(MapSpec::LattesSn { k: v[0].re })
            }
            other => Err(parse_error(1, format!("unknown map kind '{other}'"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MapSpec::Poly(_) => "poly",
            MapSpec::Rational(..) => "rat",
            MapSpec::Moebius(_) => "moebius",
            MapSpec::LattesW { .. } => "lattes-w",
            MapSpec::LattesSn { .. } => "lattes-sn",
            MapSpec::Newton(_) => "newton",
        }
    }

    pub fn moebius(&self) -> Option<crate::error::Result<MoebiusMap>> {
        match self {
            MapSpec::Moebius([a, b, c, d]) => Some(MoebiusMap::new(*a, *b, *c, *d)),
            _ => None,
        }
    }

    /// The polynomial behind `poly:` and `newton:` specs.
    pub fn polynomial(&self) -> Option<&Polynomial> {
        match self {
            MapSpec::Poly(p) | MapSpec::Newton(p) => Some(p),
            _ => None,
        }
    }

    pub fn to_map(&self) -> crate::error::Result<RationalMap> {
        match self {
            MapSpec::Poly(p) => RationalMap::polynomial(p.clone()),
            MapSpec::Rational(p, q) => RationalMap::new(p.clone(), q.clone()),
            MapSpec::Moebius(_) => Ok(self.moebius().expect("moebius spec")?.to_rational()),
            MapSpec::LattesW { g2, g3 } => lattes_weierstrass(*g2, *g3),
            MapSpec::LattesSn { k } => lattes_sn(*k),
            MapSpec::Newton(p) => newton_map(p),
        }
    }

    pub fn describe(&self, spec: &str, f: &RationalMap) -> MapDescription {
        MapDescription {
            spec: spec.trim().to_string(),
            kind: self.kind(),
            numerator: f.num().coeffs().to_vec(),
            denominator: f.den().coeffs().to_vec(),
            degree: f.degree(),
        }
    }
}
