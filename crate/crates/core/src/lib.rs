pub mod builders;
pub mod check;
pub mod contour;
pub mod grammar;
pub mod machine;
pub mod store;
