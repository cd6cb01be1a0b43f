pub mod copula;
pub mod distortion;
pub mod error;
pub mod figures;
pub mod level;
pub mod marginal;
pub mod oracle;
pub mod orders;
pub mod quad;
pub mod riskcore;
pub mod solve;
pub mod special;
pub mod verdict;
