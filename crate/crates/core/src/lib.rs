pub mod error;
pub mod factor;
pub mod linalg;
pub mod mpoly;
pub mod roots;
pub mod scalar;
pub mod parser;
pub mod exppoly;
pub mod decomposition;
pub mod lpoly;
pub mod variety;
pub mod reduction;
pub mod rotundity;
pub mod numeric;
pub mod corpus;
