pub mod eig;
pub mod ode;
pub mod optim;
pub mod poly;
pub mod quad;
pub mod roots;
