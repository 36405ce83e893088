pub mod dispatch;
pub mod inner;
pub mod model;
pub mod reliability;
pub mod report;
pub mod robust;
pub mod solver;
pub mod uncertainty;
