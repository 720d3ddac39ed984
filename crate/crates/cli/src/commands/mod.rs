pub mod cstar;
pub mod sigma;
pub mod sim;
