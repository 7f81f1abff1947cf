pub mod checks;
pub mod error;
pub mod infratype;
pub mod multifn;
pub mod partition;
pub mod radstrom;
pub mod real;
pub mod riemann;
pub mod sets;
pub mod space;

// The guide's snippets run as doctests: each chapter becomes an empty module
// whose docs are the chapter text.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/sets.md")]
    mod sets {}
    #[doc = include_str!("../../../book/src/esums.md")]
    mod esums {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/multifunctions.md")]
    mod multifunctions {}
    #[doc = include_str!("../../../book/src/riemann.md")]
    mod riemann {}
    #[doc = include_str!("../../../book/src/empty.md")]
    mod empty {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/infratype.md")]
    mod infratype {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/schema.md")]
    mod schema {}
}
