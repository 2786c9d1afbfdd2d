//! Closed registry of host functions callable from programs.
//!
//! Every built-in declares the access each argument must carry. Outputs are
//! returned as values to join into the written arguments, so a built-in can
//! only add information to its write targets.

use std::str::FromStr;

use thiserror::Error;

use crate::ast::AccessAnnotation::{self, Read, ReadWrite, Write};
use crate::lattice::{Es, FSet, LatticeType, LatticeValue, NEG_INF, POS_INF};
use crate::solver::{fail_first_var, middle_value, propagate_fixpoint, CStore, FdVar, Model, Propagator, VStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Inc,
    JoinInto,
    Propagate,
    FailFirstVar,
    MiddleValue,
    Le,
    Gt,
    Lt,
    Ne,
    EqDiff,
    NewFdVar,
    ModelDomains,
    ModelConstraints,
    ModelObjective,
    UpdateBound,
    LowerBound,
}

/// Type expected for a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamType {
    Exact(LatticeType),
    /// Any lattice type.
    Any,
    /// The type of the first argument.
    SameAsFirst,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub ty: ParamType,
    pub access: AccessAnnotation,
}

#[derive(Debug, Clone, Copy)]
pub struct Signature {
    pub params: &'static [Param],
    pub ret: Option<LatticeType>,
}

const fn p(ty: LatticeType, access: AccessAnnotation) -> Param {
    Param { ty: ParamType::Exact(ty), access }
}

const LMAX_R: Param = p(LatticeType::LMax, Read);
const LMAX_RW: Param = p(LatticeType::LMax, ReadWrite);
const LMIN_R: Param = p(LatticeType::LMin, Read);
const VSTORE_R: Param = p(LatticeType::VStore, Read);
const VSTORE_W: Param = p(LatticeType::VStore, Write);
const VSTORE_RW: Param = p(LatticeType::VStore, ReadWrite);
const CSTORE_R: Param = p(LatticeType::CStore, Read);

impl Builtin {
    pub const ALL: [Builtin; 16] = [
        Builtin::Inc,
        Builtin::JoinInto,
        Builtin::Propagate,
        Builtin::FailFirstVar,
        Builtin::MiddleValue,
        Builtin::Le,
        Builtin::Gt,
        Builtin::Lt,
        Builtin::Ne,
        Builtin::EqDiff,
        Builtin::NewFdVar,
        Builtin::ModelDomains,
        Builtin::ModelConstraints,
        Builtin::ModelObjective,
        Builtin::UpdateBound,
        Builtin::LowerBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Inc => "inc",
            Builtin::JoinInto => "join_into",
            Builtin::Propagate => "propagate",
            Builtin::FailFirstVar => "fail_first_var",
            Builtin::MiddleValue => "middle_value",
            Builtin::Le => "le",
            Builtin::Gt => "gt",
            Builtin::Lt => "lt",
            Builtin::Ne => "ne",
            Builtin::EqDiff => "eq_diff",
            Builtin::NewFdVar => "new_fd_var",
            Builtin::ModelDomains => "model_domains",
            Builtin::ModelConstraints => "model_constraints",
            Builtin::ModelObjective => "model_objective",
            Builtin::UpdateBound => "update_bound",
            Builtin::LowerBound => "lower_bound",
        }
    }

    pub fn signature(self) -> Signature {
        use LatticeType::*;
        let (params, ret): (&'static [Param], _) = match self {
            Builtin::Inc => (&[LMAX_RW], None),
            Builtin::JoinInto => {
                (&[Param { ty: ParamType::Any, access: Write }, Param { ty: ParamType::SameAsFirst, access: Read }], None)
            }
            Builtin::Propagate => (&[VSTORE_RW, CSTORE_R], Some(Es)),
            Builtin::FailFirstVar => (&[VSTORE_R], Some(LMax)),
            Builtin::MiddleValue => (&[VSTORE_R, LMAX_R], Some(LMax)),
            Builtin::Le | Builtin::Gt | Builtin::Lt => (&[LMAX_R, LMAX_R], Some(CStore)),
            Builtin::Ne | Builtin::EqDiff => (&[LMAX_R, LMAX_R, LMAX_R], Some(CStore)),
            Builtin::NewFdVar => (&[LMAX_R, LMAX_R, LMAX_R], Some(VStore)),
            Builtin::ModelDomains => (&[], Some(VStore)),
            Builtin::ModelConstraints => (&[], Some(CStore)),
            Builtin::ModelObjective => (&[], Some(LMax)),
            Builtin::UpdateBound => (&[VSTORE_W, LMAX_R, LMIN_R], Some(Es)),
            Builtin::LowerBound => (&[VSTORE_R, LMAX_R], Some(LMin)),
        };
        Signature { params, ret }
    }

    /// Whether the returned status counts toward the node verdict.
    pub fn reports_status(self) -> bool {
        matches!(self, Builtin::Propagate | Builtin::UpdateBound)
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Builtin::ALL.iter().map(|b| b.name()).collect();
            format!("unknown host function `{s}` (available: {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HostError {
    #[error("{0}: no model is loaded")]
    NoModel(&'static str),
    #[error("{0}: the model has no objective")]
    NoObjective(&'static str),
    #[error("{0}: every variable is already fixed")]
    AllFixed(&'static str),
    #[error("{0}: `{1}` is not a finite-domain variable")]
    BadVar(&'static str, i64),
    #[error("{0}: empty domain")]
    EmptyDomain(&'static str),
    #[error("{0}: bad argument")]
    BadArgument(&'static str),
}

/// Environment of a host call.
#[derive(Debug, Clone, Copy, Default)]
pub struct HostCtx<'a> {
    pub model: Option<&'a Model>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HostOutput {
    /// Values to join into arguments, by argument index.
    pub writes: Vec<(usize, LatticeValue)>,
    pub ret: Option<LatticeValue>,
}

fn int(b: Builtin, v: &LatticeValue) -> Result<i64, HostError> {
    v.as_int().ok_or(HostError::BadArgument(b.name()))
}

fn var(b: Builtin, v: &LatticeValue) -> Result<FdVar, HostError> {
    let i = int(b, v)?;
    FdVar::try_from(i).map_err(|_| HostError::BadVar(b.name(), i))
}

fn vstore(b: Builtin, v: &LatticeValue) -> Result<&VStore, HostError> {
    match v {
        LatticeValue::VStore(s) => Ok(s),
        _ => Err(HostError::BadArgument(b.name())),
    }
}

fn cstore(b: Builtin, v: &LatticeValue) -> Result<&CStore, HostError> {
    match v {
        LatticeValue::CStore(s) => Ok(s),
        _ => Err(HostError::BadArgument(b.name())),
    }
}

fn constraint(p: Propagator) -> Option<LatticeValue> {
    Some(LatticeValue::CStore(CStore::from_props([p])))
}

/// Runs `b` on the current values of its arguments.
pub fn call(b: Builtin, args: &[LatticeValue], ctx: &HostCtx) -> Result<HostOutput, HostError> {
    let name = b.name();
    if args.len() != b.signature().params.len() {
        return Err(HostError::BadArgument(name));
    }
    let model = || ctx.model.ok_or(HostError::NoModel(name));
    let mut out = HostOutput::default();
    match b {
        Builtin::Inc => {
            let v = match &args[0] {
                LatticeValue::LMax(v) => LatticeValue::LMax(if *v == NEG_INF { 0 } else { v.saturating_add(1) }),
                _ => return Err(HostError::BadArgument(name)),
            };
            out.writes.push((0, v));
        }
        Builtin::JoinInto => out.writes.push((0, args[1].clone())),
        Builtin::Propagate => {
            let (d, st) = propagate_fixpoint(vstore(b, &args[0])?, cstore(b, &args[1])?);
            out.writes.push((0, LatticeValue::VStore(d)));
            out.ret = Some(LatticeValue::Es(st));
        }
        Builtin::FailFirstVar => {
            let x = fail_first_var(vstore(b, &args[0])?).ok_or(HostError::AllFixed(name))?;
            out.ret = Some(LatticeValue::LMax(x as i64));
        }
        Builtin::MiddleValue => {
            let v = middle_value(vstore(b, &args[0])?, var(b, &args[1])?).ok_or(HostError::EmptyDomain(name))?;
            out.ret = Some(LatticeValue::LMax(v));
        }
        Builtin::Le => out.ret = constraint(Propagator::LeConst(var(b, &args[0])?, int(b, &args[1])?)),
        Builtin::Gt => out.ret = constraint(Propagator::GtConst(var(b, &args[0])?, int(b, &args[1])?)),
        Builtin::Lt => out.ret = constraint(Propagator::LtVar(var(b, &args[0])?, var(b, &args[1])?)),
        Builtin::Ne => {
            out.ret = constraint(Propagator::NeOffset(var(b, &args[0])?, var(b, &args[1])?, int(b, &args[2])?))
        }
        Builtin::EqDiff => {
            out.ret = constraint(Propagator::EqDiff(var(b, &args[0])?, var(b, &args[1])?, var(b, &args[2])?))
        }
        Builtin::NewFdVar => {
            let x = var(b, &args[0])?;
            let d = FSet::range(int(b, &args[1])?, int(b, &args[2])?);
            out.ret = Some(LatticeValue::VStore(VStore::single(x, d)));
        }
        Builtin::ModelDomains => out.ret = Some(LatticeValue::VStore(model()?.domains.clone())),
        Builtin::ModelConstraints => out.ret = Some(LatticeValue::CStore(model()?.constraints.clone())),
        Builtin::ModelObjective => {
            let x = model()?.objective.ok_or(HostError::NoObjective(name))?;
            out.ret = Some(LatticeValue::LMax(x as i64));
        }
        Builtin::UpdateBound => {
            let x = var(b, &args[1])?;
            match &args[2] {
                LatticeValue::LMin(POS_INF) => {}
                LatticeValue::LMin(bound) => {
                    out.writes.push((0, LatticeValue::VStore(VStore::single(x, FSet::range(0, bound - 1)))));
                }
                _ => return Err(HostError::BadArgument(name)),
            }
            out.ret = Some(LatticeValue::Es(Es::Unknown));
        }
        Builtin::LowerBound => {
            let d = vstore(b, &args[0])?.get(var(b, &args[1])?).ok_or(HostError::EmptyDomain(name))?;
            out.ret = Some(LatticeValue::LMin(d.min().ok_or(HostError::EmptyDomain(name))?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert!("nope".parse::<Builtin>().unwrap_err().contains("inc"));
    }

    #[test]
    fn inc_and_join() {
        let out = call(Builtin::Inc, &[LatticeValue::LMax(-1)], &HostCtx::default()).unwrap();
        assert_eq!(out.writes, vec![(0, LatticeValue::LMax(0))]);
        let out = call(Builtin::JoinInto, &[LatticeValue::LMax(3), LatticeValue::LMax(1)], &HostCtx::default()).unwrap();
        assert_eq!(out.writes, vec![(0, LatticeValue::LMax(1))]);
        assert!(call(Builtin::ModelDomains, &[], &HostCtx::default()).is_err());
    }

    #[test]
    fn update_bound_restricts_objective() {
        let args = [LatticeValue::VStore(VStore::new()), LatticeValue::LMax(2), LatticeValue::LMin(5)];
        let out = call(Builtin::UpdateBound, &args, &HostCtx::default()).unwrap();
        assert_eq!(out.writes, vec![(0, LatticeValue::VStore(VStore::single(2, FSet::range(0, 4))))]);
        assert_eq!(out.ret, Some(LatticeValue::Es(Es::Unknown)));
    }
}
