pub mod allan;
pub mod bounds;
pub mod fit;
pub mod flux;
pub mod mu;
pub mod sigma_c;
pub mod simulate;
pub mod te;
