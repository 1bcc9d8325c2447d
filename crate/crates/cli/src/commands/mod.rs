pub mod decode;
pub mod exp1;
pub mod exp2;
pub mod fit;
pub mod pimc;
pub mod propagator;
pub mod rerun;
