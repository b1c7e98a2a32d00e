pub mod audit;
pub mod bipoint;
pub mod combine;
pub mod gen;
pub mod io;
pub mod kcenter;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod rat;
pub mod solver;
pub mod verify;
