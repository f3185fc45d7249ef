pub mod detright;
pub mod dn;
pub mod linalg;
pub mod monodromy;
pub mod numeric;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod verify;
pub mod weyl;
