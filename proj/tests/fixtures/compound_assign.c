int sum;

void *adder(void *arg) {
  sum += 2;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, adder, 0);
  sum -= 1;
  pthread_join(t, 0);
  return sum;
}
