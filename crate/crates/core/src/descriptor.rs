//! Textual descriptors for means and log pairs.
//!
//! Grammar:
//!
//! ```text
//! mean     := power:t=<v>,q=<v>
//!           | mixture:(s1,v1);(s2,v2);...
//!           | semigroup:base=<logpair>,t=<v>
//! logpair  := logpair:power:q=<v>
//!           | logpair:koenigs:base=<mean>
//!           | logpair:affine:base=<mean>
//! ```
//!
//! The grammar is mutually recursive (a semigroup mean wraps a pair, a
//! Koenigs pair wraps a mean). Since a mean descriptor may itself contain
//! `,t=` (nested power means), the semigroup form splits on the LAST
//! occurrence. Labels produced by the constructed objects parse back to
//! equivalent objects.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logpair::{
    logpair_affine_from_f, logpair_from_f, logpair_power, semigroup_member, LogPair,
    KOENIGS_DEFAULT_TOL,
};
use crate::repfn::RepresentingFunction;

fn parse_number(token: &str, what: &str) -> Result<f64> {
    token.trim().parse::<f64>().map_err(|_| {
        Error::InvalidInput(format!("cannot parse {what} from '{token}'"))
    })
}

/// Parses a mean descriptor.
pub fn parse_mean(desc: &str) -> Result<RepresentingFunction> {
    let desc = desc.trim();
    if let Some(rest) = desc.strip_prefix("power:") {
        let mut t = None;
        let mut q = None;
        for part in rest.split(',') {
            if let Some(v) = part.strip_prefix("t=") {
                t = Some(parse_number(v, "t")?);
            } else if let Some(v) = part.strip_prefix("q=") {
                q = Some(parse_number(v, "q")?);
            } else {
                return Err(Error::InvalidInput(format!(
                    "unexpected token '{part}' in power descriptor '{desc}'"
                )));
            }
        }
        let (Some(t), Some(q)) = (t, q) else {
            return Err(Error::InvalidInput(format!(
                "power descriptor needs both t= and q=, got '{desc}'"
            )));
        };
        return RepresentingFunction::power_family(t, q);
    }
    if let Some(rest) = desc.strip_prefix("mixture:") {
        let mut atoms = Vec::new();
        for piece in rest.split(';') {
            let piece = piece.trim();
            let inner = piece
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "mixture atom '{piece}' is not of the form (s,v)"
                    ))
                })?;
            let (s, v) = inner.split_once(',').ok_or_else(|| {
                Error::InvalidInput(format!(
                    "mixture atom '{piece}' needs two comma-separated numbers"
                ))
            })?;
            atoms.push((parse_number(s, "atom location")?, parse_number(v, "atom weight")?));
        }
        return RepresentingFunction::harmonic_mixture(&atoms);
    }
    if let Some(rest) = desc.strip_prefix("semigroup:base=") {
        let (base, t_str) = rest.rsplit_once(",t=").ok_or_else(|| {
            Error::InvalidInput(format!(
                "semigroup descriptor needs a trailing ,t=<v>: '{desc}'"
            ))
        })?;
        let pair = Arc::new(parse_logpair(base)?);
        let t = parse_number(t_str, "semigroup parameter")?;
        return semigroup_member(&pair, t);
    }
    Err(Error::InvalidInput(format!(
        "unknown mean descriptor '{desc}'; expected power:, mixture:, or semigroup:"
    )))
}

/// Parses a log-pair descriptor.
pub fn parse_logpair(desc: &str) -> Result<LogPair> {
    let desc = desc.trim();
    let Some(rest) = desc.strip_prefix("logpair:") else {
        return Err(Error::InvalidInput(format!(
            "log pair descriptor must start with 'logpair:', got '{desc}'"
        )));
    };
    if let Some(v) = rest.strip_prefix("power:q=") {
        return logpair_power(parse_number(v, "q")?);
    }
    if let Some(base) = rest.strip_prefix("koenigs:base=") {
        let f = parse_mean(base)?;
        return logpair_from_f(&f, KOENIGS_DEFAULT_TOL);
    }
    if let Some(base) = rest.strip_prefix("affine:base=") {
        let f = parse_mean(base)?;
        return logpair_affine_from_f(&f);
    }
    Err(Error::InvalidInput(format!(
        "unknown log pair descriptor '{desc}'; expected logpair:power:, \
         logpair:koenigs:, or logpair:affine:"
    )))
}
