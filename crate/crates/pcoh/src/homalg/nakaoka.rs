// placeholder
pub fn nakaoka_dims() {}
