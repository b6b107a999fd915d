use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

/// Built-in functions. Binder forms take `name(x in xs, body)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Func {
    Map,
    Filter,
    Count,
    Sum,
    Len,
    Min,
    Max,
    Abs,
    Zip,
    Range,
    At,
    Faces,
    Uniform,
    Block,
    Support,
    Height,
    Results,
}

impl Func {
    pub const ALL: [Func; 17] = [
        Func::Map,
        Func::Filter,
        Func::Count,
        Func::Sum,
        Func::Len,
        Func::Min,
        Func::Max,
        Func::Abs,
        Func::Zip,
        Func::Range,
        Func::At,
        Func::Faces,
        Func::Uniform,
        Func::Block,
        Func::Support,
        Func::Height,
        Func::Results,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Map => "map",
            Func::Filter => "filter",
            Func::Count => "count",
            Func::Sum => "sum",
            Func::Len => "len",
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Zip => "zip",
            Func::Range => "range",
            Func::At => "at",
            Func::Faces => "faces",
            Func::Uniform => "uniform",
            Func::Block => "block",
            Func::Support => "support",
            Func::Height => "height",
            Func::Results => "results",
        }
    }

    pub fn lookup(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    pub fn is_binder(self) -> bool {
        matches!(self, Func::Map | Func::Filter | Func::Count)
    }

    /// Accepted argument counts for the plain call form.
    pub fn arity(self) -> &'static [usize] {
        match self {
            Func::Map | Func::Filter | Func::Count => &[],
            Func::Min | Func::Max => &[1, 2],
            Func::Zip | Func::At => &[2],
            _ => &[1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    /// `func(var in collection, body)`
    Bind(Func, String, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn node_count(&self) -> usize {
        1 + match self {
            Expr::Num(_) | Expr::Var(_) => 0,
            Expr::Neg(e) => e.node_count(),
            Expr::Binary(_, a, b) | Expr::Let(_, a, b) | Expr::Bind(_, _, a, b) => a.node_count() + b.node_count(),
            Expr::If(c, t, e) => c.node_count() + t.node_count() + e.node_count(),
            Expr::Call(_, args) => args.iter().map(Expr::node_count).sum(),
        }
    }
}
