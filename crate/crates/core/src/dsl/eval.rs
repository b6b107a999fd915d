//! Tree-walking interpreter with a step budget and a collection-size cap.

use std::sync::Arc;

use num_rational::Rational64;

use super::ast::{BinOp, Expr, Func};
use super::value::{StateView, Value};
use super::{EvalLimits, Fault, FaultKind};
use crate::domains::{CubeState, Face};

struct Interp<'a> {
    env: Vec<(&'a str, Value)>,
    steps: usize,
    limits: EvalLimits,
}

type EResult = Result<Value, Fault>;

fn type_fault(msg: impl Into<String>) -> Fault {
    Fault::new(FaultKind::Type, msg)
}

fn num(v: &Value, what: &str) -> Result<f64, Fault> {
    match v {
        Value::Num(x) => Ok(*x),
        other => Err(type_fault(format!("{what} expects a number, got {}", other.type_name()))),
    }
}

fn boolean(v: &Value, what: &str) -> Result<bool, Fault> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(type_fault(format!("{what} expects a bool, got {}", other.type_name()))),
    }
}

fn list<'v>(v: &'v Value, what: &str) -> Result<&'v Arc<Vec<Value>>, Fault> {
    match v {
        Value::List(items) => Ok(items),
        other => Err(type_fault(format!("{what} expects a list, got {}", other.type_name()))),
    }
}

fn index(v: &Value, what: &str) -> Result<usize, Fault> {
    let x = num(v, what)?;
    if x < 0.0 || x.fract() != 0.0 || !x.is_finite() {
        return Err(type_fault(format!("{what} expects a nonnegative integer, got {x}")));
    }
    Ok(x as usize)
}

impl<'a> Interp<'a> {
    fn tick(&mut self, n: usize) -> Result<(), Fault> {
        self.steps = self.steps.saturating_add(n);
        if self.steps > self.limits.step_budget {
            return Err(Fault::new(FaultKind::Budget, format!("step budget of {} exhausted", self.limits.step_budget)));
        }
        Ok(())
    }

    fn check_size(&self, n: usize) -> Result<(), Fault> {
        if n > self.limits.max_collection_size {
            return Err(Fault::new(
                FaultKind::CollectionOverflow,
                format!("collection of {n} elements exceeds the limit of {}", self.limits.max_collection_size),
            ));
        }
        Ok(())
    }

    fn lookup(&self, name: &str) -> EResult {
        self.env
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Fault::new(FaultKind::Unbound, format!("'{name}' is not bound")))
    }

    fn eval(&mut self, e: &'a Expr) -> EResult {
        self.tick(1)?;
        match e {
            Expr::Num(v) => Ok(Value::Num(*v)),
            Expr::Var(name) => self.lookup(name),
            Expr::Neg(inner) => {
                let v = self.eval(inner)?;
                Ok(Value::Num(-num(&v, "negation")?))
            }
            Expr::Binary(op, lhs, rhs) => self.binary(*op, lhs, rhs),
            Expr::Let(name, value, body) => {
                let v = self.eval(value)?;
                self.env.push((name, v));
                let out = self.eval(body);
                self.env.pop();
                out
            }
            Expr::If(c, t, f) => {
                let c = self.eval(c)?;
                if boolean(&c, "if")? {
                    self.eval(t)
                } else {
                    self.eval(f)
                }
            }
            Expr::Call(func, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a)?);
                }
                self.call(*func, vals)
            }
            Expr::Bind(func, var, coll, body) => {
                let coll = self.eval(coll)?;
                let items = list(&coll, func.name())?.clone();
                let mut mapped = Vec::new();
                let mut kept = Vec::new();
                let mut count = 0usize;
                for item in items.iter() {
                    self.env.push((var, item.clone()));
                    let r = self.eval(body);
                    self.env.pop();
                    let r = r?;
                    match func {
                        Func::Map => mapped.push(r),
                        Func::Filter => {
                            if boolean(&r, "filter")? {
                                kept.push(item.clone());
                            }
                        }
                        Func::Count => {
                            if boolean(&r, "count")? {
                                count += 1;
                            }
                        }
                        _ => unreachable!("parser only builds binder forms for map/filter/count"),
                    }
                }
                Ok(match func {
                    Func::Map => Value::list(mapped),
                    Func::Filter => Value::list(kept),
                    _ => Value::Num(count as f64),
                })
            }
        }
    }

    fn binary(&mut self, op: BinOp, lhs: &'a Expr, rhs: &'a Expr) -> EResult {
        if matches!(op, BinOp::And | BinOp::Or) {
            let l = boolean(&self.eval(lhs)?, op.symbol())?;
            if (op == BinOp::And && !l) || (op == BinOp::Or && l) {
                return Ok(Value::Bool(l));
            }
            return Ok(Value::Bool(boolean(&self.eval(rhs)?, op.symbol())?));
        }
        let l = self.eval(lhs)?;
        let r = self.eval(rhs)?;
        match op {
            BinOp::Eq | BinOp::Ne => {
                if std::mem::discriminant(&l) != std::mem::discriminant(&r) {
                    return Err(type_fault(format!("cannot compare {} with {}", l.type_name(), r.type_name())));
                }
                let eq = l == r;
                Ok(Value::Bool(if op == BinOp::Eq { eq } else { !eq }))
            }
            _ => {
                let a = num(&l, op.symbol())?;
                let b = num(&r, op.symbol())?;
                Ok(match op {
                    BinOp::Add => Value::Num(a + b),
                    BinOp::Sub => Value::Num(a - b),
                    BinOp::Mul => Value::Num(a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Fault::new(FaultKind::DivZero, "division by zero"));
                        }
                        Value::Num(a / b)
                    }
                    BinOp::Lt => Value::Bool(a < b),
                    BinOp::Le => Value::Bool(a <= b),
                    BinOp::Gt => Value::Bool(a > b),
                    BinOp::Ge => Value::Bool(a >= b),
                    _ => unreachable!(),
                })
            }
        }
    }

    fn call(&mut self, func: Func, args: Vec<Value>) -> EResult {
        let arg = |i: usize| &args[i];
        match func {
            Func::Sum => {
                let items = list(arg(0), "sum")?;
                self.tick(items.len())?;
                let mut total = 0.0;
                for v in items.iter() {
                    total += num(v, "sum")?;
                }
                Ok(Value::Num(total))
            }
            Func::Len => Ok(Value::Num(list(arg(0), "len")?.len() as f64)),
            Func::Min | Func::Max => {
                let pick = |a: f64, b: f64| if func == Func::Min { a.min(b) } else { a.max(b) };
                if args.len() == 2 {
                    return Ok(Value::Num(pick(num(arg(0), func.name())?, num(arg(1), func.name())?)));
                }
                let items = list(arg(0), func.name())?;
                self.tick(items.len())?;
                let mut acc: Option<f64> = None;
                for v in items.iter() {
                    let x = num(v, func.name())?;
                    acc = Some(acc.map_or(x, |a| pick(a, x)));
                }
                acc.map(Value::Num).ok_or_else(|| type_fault(format!("{} of an empty list", func.name())))
            }
            Func::Abs => Ok(Value::Num(num(arg(0), "abs")?.abs())),
            Func::Zip => {
                let a = list(arg(0), "zip")?;
                let b = list(arg(1), "zip")?;
                let n = a.len().min(b.len());
                self.check_size(n)?;
                self.tick(n)?;
                Ok(Value::list(a.iter().zip(b.iter()).map(|(x, y)| Value::list(vec![x.clone(), y.clone()])).collect()))
            }
            Func::Range => {
                let x = num(arg(0), "range")?;
                if x > self.limits.max_collection_size as f64 {
                    self.check_size(usize::MAX)?;
                }
                let n = index(arg(0), "range")?;
                self.check_size(n)?;
                self.tick(n)?;
                Ok(Value::list((0..n).map(|i| Value::Num(i as f64)).collect()))
            }
            Func::At => {
                let items = list(arg(0), "at")?;
                let i = index(arg(1), "at")?;
                items.get(i).cloned().ok_or_else(|| type_fault(format!("index {i} out of range for length {}", items.len())))
            }
            Func::Faces => {
                let items = list(arg(0), "faces")?;
                if items.len() != 24 {
                    return Err(type_fault(format!("faces expects 24 facelets, got {}", items.len())));
                }
                Ok(Value::list(items.chunks(4).map(|c| Value::list(c.to_vec())).collect()))
            }
            Func::Uniform => {
                let items = list(arg(0), "uniform")?;
                Ok(Value::Bool(items.windows(2).all(|w| w[0] == w[1])))
            }
            Func::Block | Func::Support | Func::Height => match arg(0) {
                Value::Row(r) => Ok(match func {
                    Func::Block => Value::Str(r.block.as_str().into()),
                    Func::Support => Value::Str(r.support.as_str().into()),
                    _ => Value::Num(r.height as f64),
                }),
                other => Err(type_fault(format!("{} expects a row, got {}", func.name(), other.type_name()))),
            },
            Func::Results => {
                let items = list(arg(0), "results")?;
                if items.len() > 4 {
                    return Err(Fault::new(FaultKind::CollectionOverflow, "results is limited to four operands"));
                }
                let nums = items.iter().map(|v| num(v, "results")).collect::<Result<Vec<f64>, _>>()?;
                let mut out = Vec::new();
                combine_all(&nums, &mut out);
                out.sort_by(f64::total_cmp);
                out.dedup();
                self.check_size(out.len())?;
                self.tick(out.len())?;
                Ok(Value::list(out.into_iter().map(Value::Num).collect()))
            }
            Func::Map | Func::Filter | Func::Count => unreachable!("binder forms are handled in eval"),
        }
    }
}

fn combine_all(nums: &[f64], out: &mut Vec<f64>) {
    if nums.len() <= 1 {
        out.extend_from_slice(nums);
        return;
    }
    for i in 0..nums.len() {
        for j in 0..nums.len() {
            if i == j {
                continue;
            }
            let rest: Vec<f64> = nums.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| *x).collect();
            let (a, b) = (nums[i], nums[j]);
            let mut candidates = vec![a - b];
            if i < j {
                candidates.push(a + b);
                candidates.push(a * b);
            }
            if b != 0.0 {
                candidates.push(a / b);
            }
            for r in candidates {
                let mut next = rest.clone();
                next.push(r);
                combine_all(&next, out);
            }
        }
    }
}

pub(crate) fn run(expr: &Expr, view: &StateView, limits: EvalLimits) -> Result<f64, Fault> {
    let mut interp = Interp { env: view.bindings.iter().map(|(n, v)| (*n, v.clone())).collect(), steps: 0, limits };
    match interp.eval(expr)? {
        Value::Num(x) if x.is_nan() => Err(Fault::new(FaultKind::Type, "heuristic produced NaN")),
        Value::Num(x) => Ok(x),
        other => Err(type_fault(format!("heuristic must return a number, got {}", other.type_name()))),
    }
}

pub(crate) fn cube_nonuniform_faces(view: &StateView) -> Result<f64, Fault> {
    let nums = view.numbers();
    if nums.len() != 24 {
        return Err(type_fault("cube view must hold 24 facelets"));
    }
    let facelets: Vec<u8> = nums.iter().map(|&x| x as u8).collect();
    let uniform = match CubeState::from_slice(&facelets) {
        Ok(c) => c.uniform_faces(),
        // invalid color counts still have a well-defined face count
        Err(_) => Face::ALL
            .iter()
            .enumerate()
            .filter(|(i, _)| facelets[i * 4..i * 4 + 4].windows(2).all(|w| w[0] == w[1]))
            .count(),
    };
    Ok((6 - uniform) as f64)
}

pub(crate) fn bw_misplaced_plus_distance(view: &StateView) -> Result<f64, Fault> {
    let current = view.rows("state");
    let goal = view.rows("goal");
    let mut misplaced = 0usize;
    let mut distance = 0usize;
    for row in &current {
        if let Some(g) = goal.iter().find(|g| g.block == row.block) {
            if g.support != row.support {
                misplaced += 1;
                distance += row.height.abs_diff(g.height);
            }
        }
    }
    Ok((misplaced + distance) as f64)
}

pub(crate) fn g24_min_expr_gap(view: &StateView) -> Result<f64, Fault> {
    let exact: Vec<Rational64> = match &view.exact {
        Some(e) => e.clone(),
        None => view
            .numbers()
            .into_iter()
            .map(|x| Rational64::approximate_float(x).ok_or_else(|| type_fault("number not representable")))
            .collect::<Result<_, _>>()?,
    };
    if exact.is_empty() {
        return Err(type_fault("empty number list"));
    }
    Ok(crate::domains::game24::min_expression_gap(&exact))
}
