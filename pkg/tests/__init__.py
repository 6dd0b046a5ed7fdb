# Tests package for odesc
