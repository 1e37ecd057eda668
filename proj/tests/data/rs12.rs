rs N 12 r 2 t 6
0 1 6 7
1 2 7 8
2 3 8 9
3 4 9 10
4 5 10 11
5 6 11 0
