//! Seeded random generators for expressions, programs and values.
//!
//! [`Gen::expr`] produces arbitrary well-formed syntax (possibly open, not
//! necessarily evaluable) for round-trip testing. [`Gen::program`] produces
//! closed, scope-aware programs that usually evaluate; some fail or diverge
//! on purpose.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Clause, Expr, FunDef, FunId, Literal, Pattern, Var};
use crate::env::Environment;
use crate::values::{ClosureRef, Value};

const VAR_POOL: &[&str] = &["X", "Y", "Z", "A", "B", "C", "F", "G", "Acc", "_N1"];
const ATOM_POOL: &[&str] = &["ok", "error", "true", "false", "a", "nil", "plus"];
const FUN_POOL: &[&str] = &["f", "g", "h", "loop"];

pub struct Gen {
    rng: ChaCha8Rng,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Data,
    Fun(usize),
}

#[derive(Clone, Default)]
struct Scope {
    vars: Vec<(Var, Kind)>,
    funs: Vec<FunId>,
}

impl Scope {
    fn bind(&mut self, v: &Var, k: Kind) {
        self.vars.retain(|(w, _)| w != v);
        self.vars.push((v.clone(), k));
    }
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        items.choose(&mut self.rng).expect("non-empty pool")
    }

    /// `n` distinct names from the variable pool.
    fn distinct_vars(&mut self, n: usize) -> Vec<Var> {
        let mut pool: Vec<Var> = VAR_POOL.iter().map(|s| s.to_string()).collect();
        pool.shuffle(&mut self.rng);
        pool.truncate(n);
        pool
    }

    pub fn int(&mut self) -> i64 {
        match self.rng.gen_range(0..10) {
            0 => self.rng.gen_range(-1_000_000_000..1_000_000_000),
            1 => self.rng.gen_range(-10..0),
            _ => self.rng.gen_range(0..10),
        }
    }

    /// Atom text, occasionally with characters that need escaping.
    pub fn atom_text(&mut self) -> String {
        if self.chance(0.8) {
            return self.pick(ATOM_POOL).to_string();
        }
        let alphabet = ['a', 'Z', ' ', '\'', '\\', '\n', '\t', '\r', 'é', '%', '@', '~', '{'];
        let len = self.rng.gen_range(1..5);
        let mut s: String = (0..len).map(|_| *self.pick(&alphabet)).collect();
        if s.starts_with('@') {
            s.insert(0, 'x');
        }
        s
    }

    pub fn literal(&mut self) -> Literal {
        match self.rng.gen_range(0..10) {
            0..=3 => Literal::int(self.int()),
            4..=6 => Literal::Atom(self.atom_text()),
            7 => Literal::EmptyList,
            8 => Literal::EmptyTuple,
            _ => Literal::EmptyMap,
        }
    }

    /// A linear pattern; every variable is fresh with respect to `used`.
    pub fn pattern(&mut self, depth: usize, used: &mut Vec<Var>) -> Pattern {
        let free: Vec<&str> = VAR_POOL
            .iter()
            .copied()
            .filter(|v| !used.iter().any(|u| u == v))
            .collect();
        let leaf = depth == 0 || self.chance(0.4);
        if leaf {
            if !free.is_empty() && self.chance(0.5) {
                let v = self.pick(&free).to_string();
                used.push(v.clone());
                return Pattern::Var(v);
            }
            return Pattern::Literal(self.literal());
        }
        if self.chance(0.5) {
            let h = self.pattern(depth - 1, used);
            let t = self.pattern(depth - 1, used);
            Pattern::list(h, t)
        } else {
            let n = self.rng.gen_range(0..4);
            Pattern::Tuple((0..n).map(|_| self.pattern(depth - 1, used)).collect())
        }
    }

    /// Arbitrary well-formed syntax, free variables allowed.
    pub fn expr(&mut self, depth: usize) -> Expr {
        if depth == 0 || self.chance(0.25) {
            return match self.rng.gen_range(0..4) {
                0 | 1 => Expr::Literal(self.literal()),
                2 => Expr::var(*self.pick(VAR_POOL)),
                _ => Expr::fun_sig(*self.pick(FUN_POOL), self.rng.gen_range(0..3)),
            };
        }
        let d = depth - 1;
        let small = |g: &mut Self| g.rng.gen_range(0..4usize);
        match self.rng.gen_range(0..11) {
            0 => {
                let n = small(self);
                Expr::fun(self.distinct_vars(n), self.expr(d))
            }
            1 => Expr::list(self.expr(d), self.expr(d)),
            2 => {
                let n = small(self);
                Expr::Tuple((0..n).map(|_| self.expr(d)).collect())
            }
            3 => {
                let n = small(self);
                let f = if self.chance(0.7) {
                    "plus".to_string()
                } else {
                    self.atom_text()
                };
                Expr::call(f, (0..n).map(|_| self.expr(d)).collect())
            }
            4 => {
                let n = small(self);
                Expr::apply(self.expr(d), (0..n).map(|_| self.expr(d)).collect())
            }
            5 => {
                let n = self.rng.gen_range(0..4);
                let clauses = (0..n)
                    .map(|_| {
                        let p = self.pattern(2, &mut Vec::new());
                        Clause::new(p, self.expr(d), self.expr(d))
                    })
                    .collect();
                Expr::case(self.expr(d), clauses)
            }
            6 => {
                let n = small(self);
                let vars = self.distinct_vars(n);
                let binds = (0..n).map(|_| self.expr(d)).collect();
                Expr::let_in(vars, binds, self.expr(d))
            }
            7 => {
                let n = self.rng.gen_range(0..3);
                let mut names: Vec<&str> = FUN_POOL.to_vec();
                names.shuffle(&mut self.rng);
                let mut fnames = Vec::new();
                let mut funs = Vec::new();
                for name in names.into_iter().take(n) {
                    let k = small(self);
                    fnames.push(FunId::new(name, k));
                    funs.push(FunDef::new(self.distinct_vars(k), self.expr(d)));
                }
                Expr::letrec(fnames, funs, self.expr(d))
            }
            8 => {
                let n = small(self);
                let keys = (0..n).map(|_| self.expr(d)).collect();
                let vals = (0..n).map(|_| self.expr(d)).collect();
                Expr::Map(keys, vals)
            }
            _ => Expr::Literal(self.literal()),
        }
    }

    /// A closed program that usually evaluates successfully.
    pub fn program(&mut self, depth: usize) -> Expr {
        self.scoped(depth, &Scope::default())
    }

    /// Like [`Self::program`], but may read the data variables `free`.
    pub fn program_over(&mut self, depth: usize, free: &[Var]) -> Expr {
        let mut scope = Scope::default();
        for v in free {
            scope.bind(v, Kind::Data);
        }
        self.scoped(depth, &scope)
    }

    fn leaf(&mut self, scope: &Scope) -> Expr {
        let data: Vec<&Var> = scope
            .vars
            .iter()
            .filter(|(_, k)| *k == Kind::Data)
            .map(|(v, _)| v)
            .collect();
        if !data.is_empty() && self.chance(0.4) {
            return Expr::Var(self.pick(&data).to_string());
        }
        if self.chance(0.8) {
            Expr::int(self.rng.gen_range(-5..20))
        } else {
            Expr::Literal(self.literal())
        }
    }

    fn scoped(&mut self, depth: usize, scope: &Scope) -> Expr {
        if depth == 0 || self.chance(0.2) {
            return self.leaf(scope);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..12) {
            0 | 1 => Expr::call(
                "plus",
                vec![self.scoped(d, scope), self.scoped(d, scope)],
            ),
            2 => {
                let n = self.rng.gen_range(0..3);
                Expr::Tuple((0..n).map(|_| self.scoped(d, scope)).collect())
            }
            3 => Expr::list(self.scoped(d, scope), self.scoped(d, scope)),
            4 => {
                let n = self.rng.gen_range(1..3);
                let keys = (0..n).map(|_| self.scoped(d, scope)).collect();
                let vals = (0..n).map(|_| self.scoped(d, scope)).collect();
                Expr::Map(keys, vals)
            }
            5 | 6 => self.gen_let(d, scope),
            7 => {
                let (params, body) = self.fun_parts(d, scope);
                Expr::fun(params, body)
            }
            8 | 9 => self.gen_apply(d, scope),
            10 => self.gen_case(d, scope),
            _ => self.gen_letrec(d, scope),
        }
    }

    fn fun_parts(&mut self, d: usize, scope: &Scope) -> (Vec<Var>, Expr) {
        let n = self.rng.gen_range(0..3);
        let params = self.distinct_vars(n);
        let mut inner = scope.clone();
        for p in &params {
            inner.bind(p, Kind::Data);
        }
        (params, self.scoped(d, &inner))
    }

    fn gen_let(&mut self, d: usize, scope: &Scope) -> Expr {
        let n = if self.chance(0.8) { 1 } else { self.rng.gen_range(0..3) };
        let vars = self.distinct_vars(n);
        let mut inner = scope.clone();
        let mut binds = Vec::new();
        for v in &vars {
            let e = if self.chance(0.3) {
                let (params, body) = self.fun_parts(d, scope);
                inner.bind(v, Kind::Fun(params.len()));
                Expr::fun(params, body)
            } else {
                inner.bind(v, Kind::Data);
                self.scoped(d, scope)
            };
            binds.push(e);
        }
        Expr::let_in(vars, binds, self.scoped(d, &inner))
    }

    fn gen_apply(&mut self, d: usize, scope: &Scope) -> Expr {
        let mut targets: Vec<(Expr, usize)> = scope
            .vars
            .iter()
            .filter_map(|(v, k)| match k {
                Kind::Fun(n) => Some((Expr::Var(v.clone()), *n)),
                Kind::Data => None,
            })
            .collect();
        targets.extend(scope.funs.iter().map(|f| (Expr::FunSig(f.clone()), f.arity)));
        let (target, arity) = if !targets.is_empty() && self.chance(0.7) {
            self.pick(&targets).clone()
        } else {
            let (params, body) = self.fun_parts(d, scope);
            let n = params.len();
            (Expr::fun(params, body), n)
        };
        // now and then get the arity wrong
        let arity = if self.chance(0.05) { arity + 1 } else { arity };
        let args = (0..arity).map(|_| self.scoped(d, scope)).collect();
        Expr::apply(target, args)
    }

    fn gen_case(&mut self, d: usize, scope: &Scope) -> Expr {
        let scrutinee = self.scoped(d, scope);
        let n = self.rng.gen_range(0..3);
        let mut clauses = Vec::new();
        for i in 0..=n {
            let last = i == n;
            let mut used = Vec::new();
            let pattern = if last && self.chance(0.9) {
                Pattern::var(*self.pick(VAR_POOL))
            } else {
                self.pattern(2, &mut used)
            };
            let mut inner = scope.clone();
            for v in pattern.variables() {
                inner.bind(v, Kind::Data);
            }
            let guard = match self.rng.gen_range(0..6) {
                0 => Expr::atom("false"),
                1 if !last => Expr::case(
                    self.leaf(&inner),
                    vec![
                        Clause::new(
                            Pattern::Literal(Literal::int(0)),
                            Expr::atom("true"),
                            Expr::atom("false"),
                        ),
                        Clause::new(Pattern::var("_G"), Expr::atom("true"), Expr::atom("true")),
                    ],
                ),
                _ => Expr::atom("true"),
            };
            clauses.push(Clause::new(pattern, guard, self.scoped(d, &inner)));
        }
        Expr::case(scrutinee, clauses)
    }

    fn gen_letrec(&mut self, d: usize, scope: &Scope) -> Expr {
        let n = self.rng.gen_range(1..3);
        let mut names: Vec<&str> = FUN_POOL.to_vec();
        names.shuffle(&mut self.rng);
        let fnames: Vec<FunId> = names
            .into_iter()
            .take(n)
            .map(|name| FunId::new(name, self.rng.gen_range(0..3)))
            .collect();
        let mut body_scope = scope.clone();
        body_scope.funs.retain(|f| !fnames.contains(f));
        body_scope.funs.extend(fnames.iter().cloned());
        let funs = fnames
            .iter()
            .map(|f| {
                let params = self.distinct_vars(f.arity);
                // mostly non-recursive, so most programs terminate
                let mut inner = if self.chance(0.1) {
                    body_scope.clone()
                } else {
                    scope.clone()
                };
                for p in &params {
                    inner.bind(p, Kind::Data);
                }
                FunDef::new(params, self.scoped(d, &inner))
            })
            .collect();
        Expr::letrec(fnames, funs, self.scoped(d, &body_scope))
    }

    /// An arbitrary value, closures included.
    pub fn value(&mut self, depth: usize) -> Value {
        if depth == 0 || self.chance(0.4) {
            return Value::Literal(self.literal());
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => Value::list(self.value(d), self.value(d)),
            1 => {
                let n = self.rng.gen_range(0..3);
                Value::Tuple((0..n).map(|_| self.value(d)).collect())
            }
            2 => {
                let n = self.rng.gen_range(0..3);
                Value::Map(
                    (0..n).map(|_| self.value(d)).collect(),
                    (0..n).map(|_| self.value(d)).collect(),
                )
            }
            3 => {
                let n = self.rng.gen_range(0..3);
                let env: Environment = self
                    .distinct_vars(n)
                    .into_iter()
                    .map(|v| (crate::ast::EnvKey::Var(v), Value::int(self.int())))
                    .collect();
                let k = self.rng.gen_range(0..3);
                let params = self.distinct_vars(k);
                let body = self.expr(1);
                Value::closure(ClosureRef::Concrete(env), params, body)
            }
            _ => {
                let f = FunId::new(*self.pick(FUN_POOL), self.rng.gen_range(0..3));
                let params = self.distinct_vars(f.arity);
                Value::closure(ClosureRef::Named(f), params, self.expr(1))
            }
        }
    }
}
