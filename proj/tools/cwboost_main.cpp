#include <iostream>

int main() {
    std::cout << "cwboost stub\n";
    return 0;
}
