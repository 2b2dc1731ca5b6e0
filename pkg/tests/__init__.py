# Tests package for mqsynth
