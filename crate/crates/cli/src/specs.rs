//! Parsers for the compact command-line notations of sets, multifunctions
//! and partitions. Every parser also accepts `@path` for a JSON file.

use std::fs;
use std::sync::Arc;

use serde::Deserialize;
use setriemann::error::{Error, Result};
use setriemann::multifn::{
    constant_set, conv_lift, linear_singleton, poly_singleton, random_step_multifunction,
    rational_indicator, step_multifunction, Biorthogonal, L1Example, RandomStepShape,
    SharedMultifunction,
};
use setriemann::partition::{
    prime_partition, random_partition, uniform_partition, TagRule, TaggedPartition,
};
use setriemann::real::{parse_rational, Rational, Real};
use setriemann::sets::{CompactSet, ESum};
use setriemann::space::{Mode, Space, Vector};

fn bad(what: &str, s: &str, hint: &str) -> Error {
    Error::InvalidArgument(format!("bad {what} `{s}` ({hint})"))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))
}

fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<Option<T>> {
    if let Some(path) = s.strip_prefix('@') {
        return read_json(path).map(Some);
    }
    if s.trim_start().starts_with(['{', '[']) {
        return serde_json::from_str(s)
            .map(Some)
            .map_err(|e| Error::InvalidArgument(format!("bad JSON: {e}")));
    }
    Ok(None)
}

pub fn parse_real(s: &str) -> Result<Real> {
    s.parse()
}

/// Comma-separated reals; rationals such as `1/3` are accepted.
pub fn parse_reals(s: &str) -> Result<Vec<Real>> {
    s.split(',').map(|x| parse_real(x.trim())).collect()
}

pub fn parse_u64s(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| bad("integer list", s, "e.g. 2,3,5"))
        })
        .collect()
}

/// `x,y,…` as a dense vector.
pub fn parse_vector(s: &str) -> Result<Vector> {
    Ok(Vector::dense(
        parse_reals(s)?
            .iter()
            .map(Real::value)
            .collect::<Vec<f64>>(),
    ))
}

/// `x,y;x,y;…`
pub fn parse_points(s: &str) -> Result<Vec<Vector>> {
    s.split(';').map(parse_vector).collect()
}

/// `cloud:…`, `polytope:…`, `point:x,y`, `esum:w@lo..hi;…` (bins from a
/// `grid:m` space), JSON, or `@file.json`.
pub fn parse_set(s: &str, space: &Space) -> Result<CompactSet> {
    if let Some(set) = from_json::<CompactSet>(s)? {
        return Ok(set);
    }
    let hint = "cloud:x,y;x,y | polytope:… | point:x,y | esum:w@lo..hi;… | JSON | @file";
    let (kind, body) = s.split_once(':').ok_or_else(|| bad("set", s, hint))?;
    match kind {
        "cloud" => CompactSet::cloud(parse_points(body)?),
        "polytope" => CompactSet::polytope(parse_points(body)?),
        "point" => Ok(CompactSet::singleton(parse_vector(body)?)),
        "esum" => {
            let Mode::L1Grid(bins) = space.mode() else {
                return Err(Error::InvalidArgument(
                    "esum sets need a grid:m space".into(),
                ));
            };
            let mut terms = Vec::new();
            for term in body.split(';') {
                let (w, range) = term
                    .split_once('@')
                    .ok_or_else(|| bad("E-set term", term, "w@lo..hi"))?;
                let (lo, hi) = range
                    .split_once("..")
                    .ok_or_else(|| bad("E-set term", term, "w@lo..hi"))?;
                terms.push((parse_rational(w)?, parse_rational(lo)?, parse_rational(hi)?));
            }
            Ok(CompactSet::esum(ESum::new(bins, terms)?))
        }
        _ => Err(bad("set", s, hint)),
    }
}

#[derive(Deserialize)]
struct StepPiece {
    lo: String,
    hi: String,
    set: CompactSet,
}

fn first_basis(space: &Space) -> Result<Vector> {
    space.basis(0)
}

/// Built-in multifunctions:
///
/// * `constant[:<set>]`, default `{e₁}`;
/// * `singleton:linear[:v]`, `singleton:indicator[:v]`, default `v = e₁`;
/// * `singleton:poly:c₀|c₁|…`, coefficient vectors;
/// * `step[:PxK]`, a seeded random step map with `P` pieces of `K` points;
/// * `step:@pieces.json`, explicit `[{"lo","hi","set"}]` pieces;
/// * `l1`, on a grid of `bins` bins;
/// * `biorth`;
/// * `conv:<spec>`, the pointwise convex hull of another built-in.
pub fn parse_multifunction(
    s: &str,
    space: &Space,
    bins: u64,
    seed: Option<u64>,
) -> Result<SharedMultifunction> {
    let (head, rest) = match s.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (s, None),
    };
    Ok(match (head, rest) {
        ("constant", None) => Arc::new(constant_set(
            space,
            CompactSet::singleton(first_basis(space)?),
        )?),
        ("constant", Some(set)) => Arc::new(constant_set(space, parse_set(set, space)?)?),
        ("singleton", Some(kind)) => {
            let (kind, arg) = match kind.split_once(':') {
                Some((k, a)) => (k, Some(a)),
                None => (kind, None),
            };
            let v = match arg {
                Some(a) if kind != "poly" => parse_vector(a)?,
                _ => first_basis(space)?,
            };
            match kind {
                "linear" => Arc::new(linear_singleton(space, v)?),
                "indicator" => Arc::new(rational_indicator(space, v)?),
                "poly" => {
                    let coeffs = match arg {
                        Some(a) => a.split('|').map(parse_vector).collect::<Result<Vec<_>>>()?,
                        // t² e₁ by default.
                        None => vec![space.zero(), space.zero(), v],
                    };
                    Arc::new(poly_singleton(space, coeffs)?)
                }
                _ => return Err(bad("singleton", kind, "linear, poly or indicator")),
            }
        }
        ("step", Some(file)) if file.starts_with('@') => {
            let pieces: Vec<StepPiece> = read_json(&file[1..])?;
            let pieces = pieces
                .into_iter()
                .map(|p| Ok((parse_rational(&p.lo)?, parse_rational(&p.hi)?, p.set)))
                .collect::<Result<Vec<(Rational, Rational, CompactSet)>>>()?;
            Arc::new(step_multifunction(space, pieces)?)
        }
        ("step", shape) => {
            let seed = seed.ok_or_else(|| {
                Error::InvalidArgument("the random step multifunction needs --seed".into())
            })?;
            let shape = match shape {
                None => RandomStepShape::default(),
                Some(pk) => {
                    let (p, k) = pk
                        .split_once('x')
                        .ok_or_else(|| bad("step shape", pk, "PIECESxPOINTS"))?;
                    RandomStepShape {
                        pieces: p
                            .parse()
                            .map_err(|_| bad("step shape", pk, "PIECESxPOINTS"))?,
                        points_per_piece: k
                            .parse()
                            .map_err(|_| bad("step shape", pk, "PIECESxPOINTS"))?,
                    }
                }
            };
            Arc::new(random_step_multifunction(space, shape, seed)?)
        }
        ("l1", None) => Arc::new(L1Example::new(bins)?),
        ("biorth", None) => Arc::new(Biorthogonal::new()),
        ("conv", Some(inner)) => {
            Arc::new(conv_lift(parse_multifunction(inner, space, bins, seed)?)?)
        }
        _ => {
            return Err(bad(
                "multifunction",
                s,
                "constant, singleton:linear|poly|indicator, step, l1, biorth, conv:<fn>",
            ))
        }
    })
}

/// `uniform:N[:left|right|mid]`, `prime:p`, `random:MAXD` (seeded), JSON or `@file`.
pub fn parse_partition(s: &str, seed: Option<u64>) -> Result<TaggedPartition> {
    if let Some(p) = from_json::<TaggedPartition>(s)? {
        return Ok(p);
    }
    let hint = "uniform:N[:rule], prime:p, random:MAXD, JSON or @file";
    let mut parts = s.split(':');
    let kind = parts.next().unwrap_or_default();
    let arg = parts.next().ok_or_else(|| bad("partition", s, hint))?;
    let extra = parts.next();
    match kind {
        "uniform" => {
            let n = arg.parse().map_err(|_| bad("partition", s, hint))?;
            let rule: TagRule = extra.unwrap_or("mid").parse()?;
            uniform_partition(n, &rule)
        }
        "prime" => prime_partition(arg.parse().map_err(|_| bad("partition", s, hint))?),
        "random" => {
            let seed =
                seed.ok_or_else(|| Error::InvalidArgument("random partitions need --seed".into()))?;
            random_partition(arg.parse().map_err(|_| bad("partition", s, hint))?, seed)
        }
        _ => Err(bad("partition", s, hint)),
    }
}

/// The space a multifunction lives in: its own for `l1` and `biorth`,
/// otherwise the `--space` argument.
pub fn space_for(fn_spec: &str, space: &str, bins: u64) -> Result<Space> {
    let base = fn_spec.strip_prefix("conv:").unwrap_or(fn_spec);
    match base {
        "l1" => Space::l1_grid(bins),
        "biorth" => Ok(Space::sparse_hilbert()),
        _ => space.parse(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets() {
        let s = Space::euclidean(2);
        assert_eq!(parse_set("cloud:0,0;1,0", &s).unwrap().len(), 2);
        assert_eq!(
            parse_set("point:1/2,0", &s).unwrap(),
            CompactSet::singleton(Vector::dense([0.5, 0.0]))
        );
        let json = r#"{"repr":"polytope","vertices":[[0,0],[1,1]]}"#;
        assert_eq!(parse_set(json, &s).unwrap().kind(), "polytope");
        let g = Space::l1_grid(4).unwrap();
        let e = parse_set("esum:1@0..1", &g).unwrap();
        assert_eq!(e.as_esum().unwrap().bins(), 4);
        assert!(parse_set("esum:1@0..1", &s).is_err());
        assert!(parse_set("blob:1", &s).is_err());
    }

    #[test]
    fn multifunctions() {
        let s = Space::euclidean(2);
        for spec in [
            "constant",
            "singleton:linear",
            "singleton:poly",
            "singleton:indicator:0,2",
            "conv:constant",
        ] {
            assert!(parse_multifunction(spec, &s, 8, None).is_ok(), "{spec}");
        }
        assert!(parse_multifunction("step", &s, 8, None).is_err());
        assert!(parse_multifunction("step:3x2", &s, 8, Some(1)).is_ok());
        assert_eq!(
            parse_multifunction("l1", &s, 6, None)
                .unwrap()
                .space()
                .to_string(),
            "grid:6"
        );
        assert!(parse_multifunction("nope", &s, 8, None).is_err());
    }

    #[test]
    fn partitions() {
        assert_eq!(parse_partition("uniform:4", None).unwrap().len(), 4);
        assert_eq!(
            parse_partition("uniform:4:left", None).unwrap().tags()[0],
            Real::integer(0)
        );
        assert_eq!(parse_partition("prime:3", None).unwrap().len(), 3);
        assert!(parse_partition("random:0.1", None).is_err());
        assert!(parse_partition("random:0.1", Some(2)).is_ok());
    }
}
