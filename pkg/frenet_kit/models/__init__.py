# Domain values
