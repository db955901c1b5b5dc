// Mirrors of the REST API JSON shapes. The UI holds no state of its own
// beyond view state; every number shown comes from these payloads.
export {};
