# Test package for the LAS design toolkit
