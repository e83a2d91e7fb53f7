use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    Usage,
    Io,
    Validation,
}

impl Kind {
    pub fn code(self) -> i32 {
        match self {
            Kind::Usage => 2,
            Kind::Io => 3,
            Kind::Validation => 4,
        }
    }
}

/// A command failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Failure { kind, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn kind_of(e: &anomind::Error) -> Kind {
    use anomind::Error as E;
    match e {
        E::Io { .. } => Kind::Io,
        E::Csv(inner) if inner.is_io_error() => Kind::Io,
        E::Json(inner) if inner.is_io() => Kind::Io,
        _ => Kind::Validation,
    }
}

impl From<anomind::Error> for Failure {
    fn from(e: anomind::Error) -> Self {
        Failure::new(kind_of(&e), e.to_string())
    }
}

/// Exit status for an error coming out of a command.
pub fn code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.kind.code();
        }
        if let Some(e) = cause.downcast_ref::<anomind::Error>() {
            return kind_of(e).code();
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return Kind::Io.code();
        }
    }
    Kind::Validation.code()
}
