pub mod clock;
pub mod experiment;
pub mod formats;
pub mod svg;
pub mod worlds;
